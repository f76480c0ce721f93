//! Two-dimensional view of a dataset for plotting.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::model::Dataset;

/// Planar coordinates for every sample.
///
/// Data with at most two features is returned as is (a single feature gets
/// a zero second axis). Wider data is projected onto its two leading
/// principal components: features are mean-centred, the covariance matrix is
/// eigendecomposed, and each component's sign is chosen so that its
/// largest-magnitude loading is positive.
pub fn project_2d(data: &Dataset) -> Vec<[f64; 2]> {
    match data.dim() {
        1 => data.rows().map(|r| [r[0], 0.0]).collect(),
        2 => data.rows().map(|r| [r[0], r[1]]).collect(),
        _ => principal_scores(data),
    }
}

/// The two leading principal axes, as unit vectors.
pub fn principal_axes(data: &Dataset) -> [Vec<f64>; 2] {
    let (_, cov) = centred_and_covariance(data);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let axis = |k: usize| -> Vec<f64> {
        let mut v: Vec<f64> = eig.eigenvectors.column(order[k]).iter().copied().collect();
        let lead = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, x)| if x.abs() > best.1.abs() { (i, *x) } else { best });
        if lead.1 < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    };
    [axis(0), axis(1)]
}

fn centred_and_covariance(data: &Dataset) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, d) = (data.n(), data.dim());
    let x = DMatrix::from_row_slice(n, d, data.as_flat());
    let means: Vec<f64> = (0..d).map(|j| x.column(j).sum() / n as f64).collect();
    let centred = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - means[j]);
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let cov = (centred.transpose() * &centred) / denom;
    (centred, cov)
}

fn principal_scores(data: &Dataset) -> Vec<[f64; 2]> {
    let (centred, _) = centred_and_covariance(data);
    let [a, b] = principal_axes(data);
    (0..data.n())
        .map(|i| {
            let row = centred.row(i);
            let s0 = row.iter().zip(&a).map(|(x, w)| x * w).sum();
            let s1 = row.iter().zip(&b).map(|(x, w)| x * w).sum();
            [s0, s1]
        })
        .collect()
}
