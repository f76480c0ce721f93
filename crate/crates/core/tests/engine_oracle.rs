mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torque::engine::{merge_round, EngineState, RunOptions};
use torque::linkage::{cluster_distance, nearest_clusters_approx, nearest_clusters_exact};
use torque::{run, Cluster, Input, Linkage, Metric};

fn random_grouping(n: usize, groups: usize, rng: &mut ChaCha8Rng) -> Vec<Cluster> {
    let mut members = vec![Vec::new(); groups];
    for i in 0..n {
        // first `groups` samples seed each group so none is empty
        let g = if i < groups { i } else { rng.random_range(0..groups) };
        members[g].push(i);
    }
    members
        .into_iter()
        .enumerate()
        .map(|(g, m)| Cluster::new(g * 3 + 1, m))
        .collect()
}

#[test]
fn exact_nearest_matches_pair_scan() {
    for seed in 0..20 {
        let pts = random_points(8, seed);
        let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let clusters = random_grouping(8, 4, &mut rng);
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let got = nearest_clusters_exact(&clusters, &input, linkage).unwrap();
            for (i, a) in clusters.iter().enumerate() {
                let mut best: Option<(f64, usize)> = None;
                for (j, b) in clusters.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let ds: Vec<f64> = a
                        .members
                        .iter()
                        .flat_map(|&x| b.members.iter().map(move |&y| (x, y)))
                        .map(|(x, y)| euclid(&pts[x.min(y)], &pts[x.max(y)]))
                        .collect();
                    let d = match linkage {
                        Linkage::Single => ds.iter().cloned().fold(f64::INFINITY, f64::min),
                        Linkage::Complete => ds.iter().cloned().fold(0.0, f64::max),
                        _ => {
                            // lower id first fixes the summation order
                            let (p, q) = if a.id < b.id { (a, b) } else { (b, a) };
                            let mut s = 0.0;
                            for &x in &p.members {
                                for &y in &q.members {
                                    s += euclid(&pts[x.min(y)], &pts[x.max(y)]);
                                }
                            }
                            s / (ds.len() as f64)
                        }
                    };
                    if best.is_none_or(|(bd, bid)| d < bd || (d == bd && b.id < bid)) {
                        best = Some((d, b.id));
                    }
                }
                let (d, id) = best.unwrap();
                assert_eq!((got[i].target, got[i].distance), (id, d), "seed {seed} {linkage}");
            }
        }
    }
}

#[test]
fn exact_nearest_ignores_list_order() {
    let pts = random_points(10, 3);
    let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let clusters = random_grouping(10, 5, &mut rng);
    let mut reversed = clusters.clone();
    reversed.reverse();
    let a = nearest_clusters_exact(&clusters, &input, Linkage::Single).unwrap();
    let mut b = nearest_clusters_exact(&reversed, &input, Linkage::Single).unwrap();
    b.reverse();
    assert_eq!(a, b);
}

#[test]
fn single_linkage_min_merge_identity() {
    let pts = random_points(12, 8);
    let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
    let a = Cluster::new(0, vec![0, 1, 2]);
    let b = Cluster::new(1, vec![3, 4]);
    let c = Cluster::new(2, vec![5, 6, 7, 8]);
    let ab = Cluster::new(3, vec![0, 1, 2, 3, 4]);
    let dab = cluster_distance(&ab, &c, &input, Linkage::Single).unwrap();
    let da = cluster_distance(&a, &c, &input, Linkage::Single).unwrap();
    let db = cluster_distance(&b, &c, &input, Linkage::Single).unwrap();
    assert_eq!(dab, da.min(db));
}

#[test]
fn approx_matches_mean_scan() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)])
            .collect();
        let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
        let clusters = random_grouping(50, 10, &mut rng);
        let means: Vec<Vec<f64>> = clusters
            .iter()
            .map(|c| {
                let mut m = [0.0; 2];
                for &i in &c.members {
                    m[0] += pts[i][0];
                    m[1] += pts[i][1];
                }
                m.iter().map(|v| v / c.members.len() as f64).collect()
            })
            .collect();
        let got = nearest_clusters_approx(&clusters, &input).unwrap();
        for i in 0..clusters.len() {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..clusters.len() {
                if i == j {
                    continue;
                }
                let d2 = (means[i][0] - means[j][0]).powi(2) + (means[i][1] - means[j][1]).powi(2);
                if best.is_none_or(|(bd, bid)| d2 < bd || (d2 == bd && clusters[j].id < bid)) {
                    best = Some((d2, clusters[j].id));
                }
            }
            let (d2, id) = best.unwrap();
            assert_eq!(got[i].target, id);
            assert!((got[i].distance - d2.sqrt()).abs() <= 1e-12 * d2.sqrt().max(1.0));
        }
    }
}

#[test]
fn approx_singletons_equal_exact_centroid() {
    for seed in 0..10 {
        let pts = random_points(30, seed * 2);
        let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
        let singletons: Vec<Cluster> = (0..30).map(|i| Cluster::singleton(i, i)).collect();
        let approx = nearest_clusters_approx(&singletons, &input).unwrap();
        let exact = nearest_clusters_exact(&singletons, &input, Linkage::Centroid).unwrap();
        assert_eq!(approx, exact, "seed {seed}");
    }
}

#[test]
fn first_round_matches_naive() {
    for seed in 0..30 {
        let pts = random_points(10, seed);
        let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
        let state = merge_round(EngineState::new(10), &input, RunOptions::default()).unwrap();
        let naive = naive_single_linkage(&pts);
        let first: Vec<_> = naive.connections.iter().filter(|c| c.round == 0).cloned().collect();
        assert_eq!(state.log(), first.as_slice(), "seed {seed}");
        assert_eq!(state.rounds(), &naive.rounds[..2]);
        // first round: every mass is one, so every cluster links
        assert!(state.log().iter().all(|c| c.mass_product == 1));
    }
}

#[test]
fn full_runs_match_naive_with_and_without_pair_cache() {
    for seed in 0..60 {
        let n = 2 + (seed as usize % 11);
        let pts = random_points(n, seed);
        let input = Input::points(dataset(&pts), Metric::Euclidean).unwrap();
        let naive = naive_single_linkage(&pts);
        for limit in [0, 4, usize::MAX] {
            let r = run(
                &input,
                RunOptions {
                    linkage: Linkage::Single,
                    pair_cache_limit: limit,
                },
            )
            .unwrap();
            assert_eq!(r.connections, naive.connections, "seed {seed} limit {limit}");
            assert_eq!(r.rounds, naive.rounds);
        }
    }
}

#[test]
fn precomputed_matrix_matches_points() {
    let pts = random_points(11, 4);
    let data = dataset(&pts);
    let matrix = torque::linkage::pairwise_distances(&data, Metric::Euclidean).unwrap();
    let a = run(&Input::points(data, Metric::Euclidean).unwrap(), Linkage::Single).unwrap();
    let b = run(&Input::Matrix(matrix), Linkage::Single).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cosine_runs_terminate() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pts: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..5).map(|_| rng.random_range(0.1..1.0)).collect())
        .collect();
    let input = Input::points(dataset(&pts), Metric::Cosine).unwrap();
    let r = run(&input, Linkage::Single).unwrap();
    assert_eq!(r.non_redundant().count(), 39);
    assert_eq!(*r.rounds.last().unwrap(), 1);
}
