//! Seeded synthetic datasets for demos, benchmarks and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::Dataset;

/// Isotropic Gaussian blobs. Returns the points and the generating blob of
/// each point.
pub fn gaussian_blobs(centers: &[Vec<f64>], counts: &[usize], sigma: f64, seed: u64) -> (Dataset, Vec<usize>) {
    assert_eq!(centers.len(), counts.len());
    assert!(sigma >= 0.0);
    let d = centers.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (label, (center, &count)) in centers.iter().zip(counts).enumerate() {
        assert_eq!(center.len(), d);
        for _ in 0..count {
            values.extend(center.iter().map(|c| c + noise.sample(&mut rng)));
            labels.push(label);
        }
    }
    let n = labels.len();
    (Dataset::from_flat(values, n, d).expect("finite samples"), labels)
}

/// `n` points drawn uniformly from the unit hypercube of dimension `d`.
pub fn uniform(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * d).map(|_| rng.random::<f64>()).collect();
    Dataset::from_flat(values, n, d).expect("finite samples")
}

/// Three well separated planar groups of 17, 17 and 16 points.
pub fn three_groups(seed: u64) -> (Dataset, Vec<usize>) {
    gaussian_blobs(
        &[vec![0.0, 0.0], vec![12.0, 0.0], vec![6.0, 10.0]],
        &[17, 17, 16],
        0.6,
        seed,
    )
}
