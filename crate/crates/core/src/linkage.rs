//! Pairwise metrics, inter-cluster linkages and nearest-cluster queries.
//!
//! Every distance between two samples is evaluated with the lower sample
//! index first and every linkage between two clusters with the lower cluster
//! id first, so results are bit-identical regardless of query direction or
//! thread count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kdtree::{squared_euclidean, KdTree, SpatialIndex};
use crate::model::{Cluster, Dataset, DistanceMatrix};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
    Precomputed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    #[default]
    Single,
    Complete,
    Average,
    Centroid,
    /// Clusters represented by their feature means, searched through a
    /// spatial index.
    MeanRepresentative,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            "precomputed" => Ok(Metric::Precomputed),
            other => Err(Error::input(format!("unknown metric '{other}'"))),
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            "centroid" => Ok(Linkage::Centroid),
            "mean_representative" | "approx" => Ok(Linkage::MeanRepresentative),
            other => Err(Error::input(format!("unknown linkage '{other}'"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
            Metric::Precomputed => "precomputed",
        })
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Centroid => "centroid",
            Linkage::MeanRepresentative => "mean_representative",
        })
    }
}

/// What the engine clusters: raw features under a metric, or a precomputed
/// distance matrix.
#[derive(Debug, Clone)]
pub enum Input {
    Points { data: Dataset, metric: Metric },
    Matrix(DistanceMatrix),
}

impl Input {
    pub fn points(data: Dataset, metric: Metric) -> Result<Self> {
        match metric {
            Metric::Precomputed => Err(Error::input(
                "precomputed metric requires a distance matrix input",
            )),
            Metric::Cosine => {
                if let Some(i) = data.rows().position(|r| r.iter().all(|&v| v == 0.0)) {
                    return Err(Error::input(format!(
                        "row {i} has zero norm; cosine distance is undefined"
                    )));
                }
                Ok(Input::Points { data, metric })
            }
            Metric::Euclidean => Ok(Input::Points { data, metric }),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Input::Points { data, .. } => data.n(),
            Input::Matrix(m) => m.n(),
        }
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        match self {
            Input::Points { data, .. } => Some(data),
            Input::Matrix(_) => None,
        }
    }

    pub fn metric(&self) -> Metric {
        match self {
            Input::Points { metric, .. } => *metric,
            Input::Matrix(_) => Metric::Precomputed,
        }
    }

    /// Rejects linkage choices the input cannot support.
    pub fn check_linkage(&self, linkage: Linkage) -> Result<()> {
        match (self, linkage) {
            (Input::Matrix(_), Linkage::Centroid) => Err(Error::unsupported(
                "centroid linkage needs raw features, not a precomputed matrix",
            )),
            (Input::Matrix(_), Linkage::MeanRepresentative) => Err(Error::unsupported(
                "mean-representative mode needs raw features, not a precomputed matrix",
            )),
            (Input::Points { metric, .. }, Linkage::MeanRepresentative)
                if *metric != Metric::Euclidean =>
            {
                Err(Error::unsupported(
                    "mean-representative mode is only available for the euclidean metric",
                ))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn source(&self) -> Source<'_> {
        match self {
            Input::Matrix(m) => Source::Matrix(m),
            Input::Points {
                data,
                metric: Metric::Cosine,
            } => Source::Cosine {
                data,
                norms: data.rows().map(norm).collect(),
            },
            Input::Points { data, .. } => Source::Euclidean(data),
        }
    }
}

/// Sample-level distance oracle shared by the exact routines.
pub(crate) enum Source<'a> {
    Matrix(&'a DistanceMatrix),
    Euclidean(&'a Dataset),
    Cosine { data: &'a Dataset, norms: Vec<f64> },
}

impl Source<'_> {
    #[inline]
    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match self {
            Source::Matrix(m) => m.get(a, b),
            Source::Euclidean(data) => euclidean(data.row(a), data.row(b)),
            Source::Cosine { data, norms } => {
                cosine_with_norms(data.row(a), data.row(b), norms[a], norms[b])
            }
        }
    }

    fn metric_between(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Source::Cosine { .. } => cosine(a, b),
            _ => euclidean(a, b),
        }
    }
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `1 - cos(a, b)`, clamped at zero against rounding.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    cosine_with_norms(a, b, norm(a), norm(b))
}

#[inline]
fn cosine_with_norms(a: &[f64], b: &[f64], na: f64, nb: f64) -> f64 {
    (1.0 - dot(a, b) / (na * nb)).max(0.0)
}

/// Dense pairwise distance matrix. Rows are filled in parallel.
pub fn pairwise_distances(data: &Dataset, metric: Metric) -> Result<DistanceMatrix> {
    let input = Input::points(data.clone(), metric)?;
    let src = input.source();
    let n = data.n();
    let mut entries = vec![0.0; n * n];
    par::for_each_row(&mut entries, n.max(1), |i, row| {
        for (j, slot) in row.iter_mut().enumerate() {
            if i != j {
                *slot = src.dist(i, j);
            }
        }
    });
    Ok(DistanceMatrix::from_trusted(entries, n))
}

/// Result of a nearest-cluster query for one cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    /// Id of the nearest other cluster.
    pub target: usize,
    pub distance: f64,
    /// `(sample in the queried cluster, sample in the target)` realizing the
    /// link at the sample level.
    pub pair: (usize, usize),
}

/// Minimum-distance member pair, ties broken by the sorted sample indices.
/// Returned as `(distance, lo, hi)`.
pub(crate) type PairKey = (f64, usize, usize);

#[inline]
pub(crate) fn pair_key(d: f64, i: usize, j: usize) -> PairKey {
    if i <= j {
        (d, i, j)
    } else {
        (d, j, i)
    }
}

#[inline]
pub(crate) fn key_less(a: &PairKey, b: &PairKey) -> bool {
    a.0 < b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
}

fn closest_pair(a: &[usize], b: &[usize], src: &Source<'_>) -> PairKey {
    let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
    for &i in a {
        for &j in b {
            let k = pair_key(src.dist(i, j), i, j);
            if key_less(&k, &best) {
                best = k;
            }
        }
    }
    best
}

/// Orients a sorted pair so the first sample belongs to `members`.
pub(crate) fn orient(lo: usize, hi: usize, members: &[usize]) -> (usize, usize) {
    if members.binary_search(&lo).is_ok() {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

fn mean_of(members: &[usize], data: &Dataset) -> Vec<f64> {
    let mut acc = vec![0.0; data.dim()];
    for &m in members {
        for (a, v) in acc.iter_mut().zip(data.row(m)) {
            *a += v;
        }
    }
    let count = members.len() as f64;
    acc.iter_mut().for_each(|a| *a /= count);
    acc
}

/// Linkage distance between two member lists. `a` must be the cluster with
/// the lower id. Centroid linkage reads `means`.
fn linkage_value(
    a: &[usize],
    b: &[usize],
    src: &Source<'_>,
    linkage: Linkage,
    means: Option<(&[f64], &[f64])>,
) -> f64 {
    match linkage {
        Linkage::Single => closest_pair(a, b, src).0,
        Linkage::Complete => {
            let mut worst = 0.0f64;
            for &i in a {
                for &j in b {
                    worst = worst.max(src.dist(i, j));
                }
            }
            worst
        }
        Linkage::Average => {
            let mut sum = 0.0;
            for &i in a {
                for &j in b {
                    sum += src.dist(i, j);
                }
            }
            sum / (a.len() as f64 * b.len() as f64)
        }
        Linkage::Centroid | Linkage::MeanRepresentative => {
            let (ma, mb) = means.expect("means are computed for centroid linkage");
            src.metric_between(ma, mb)
        }
    }
}

/// Distance between two disjoint clusters under `linkage`.
pub fn cluster_distance(a: &Cluster, b: &Cluster, input: &Input, linkage: Linkage) -> Result<f64> {
    if a.members.is_empty() || b.members.is_empty() {
        return Err(Error::input("clusters must be nonempty"));
    }
    if linkage == Linkage::MeanRepresentative {
        return Err(Error::unsupported(
            "mean-representative distances are served by the approximate query",
        ));
    }
    input.check_linkage(linkage)?;
    let (a, b) = if a.id <= b.id { (a, b) } else { (b, a) };
    let src = input.source();
    let means = match (linkage, input.dataset()) {
        (Linkage::Centroid, Some(data)) => Some((mean_of(&a.members, data), mean_of(&b.members, data))),
        _ => None,
    };
    Ok(linkage_value(
        &a.members,
        &b.members,
        &src,
        linkage,
        means.as_ref().map(|(x, y)| (x.as_slice(), y.as_slice())),
    ))
}

/// For every cluster, the nearest other cluster under `linkage`, found by
/// scanning all cluster pairs. Ties go to the smallest cluster id.
pub fn nearest_clusters_exact(
    clusters: &[Cluster],
    input: &Input,
    linkage: Linkage,
) -> Result<Vec<Nearest>> {
    if clusters.len() < 2 {
        return Err(Error::State(
            "nearest-cluster query needs at least two clusters".into(),
        ));
    }
    if linkage == Linkage::MeanRepresentative {
        return Err(Error::unsupported(
            "use the approximate query for mean-representative mode",
        ));
    }
    input.check_linkage(linkage)?;
    let src = input.source();
    let means: Vec<Vec<f64>> = match (linkage, input.dataset()) {
        (Linkage::Centroid, Some(data)) => clusters.iter().map(|c| mean_of(&c.members, data)).collect(),
        _ => Vec::new(),
    };
    let result = par::map_range(clusters.len(), |i| {
            let ci = &clusters[i];
            let mut best: Option<(f64, usize, usize)> = None; // (distance, id, position)
            for (j, cj) in clusters.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (lo, hi) = if ci.id <= cj.id { (i, j) } else { (j, i) };
                let m = if means.is_empty() {
                    None
                } else {
                    Some((means[lo].as_slice(), means[hi].as_slice()))
                };
                let d = linkage_value(&clusters[lo].members, &clusters[hi].members, &src, linkage, m);
                if best.is_none_or(|(bd, bid, _)| d < bd || (d == bd && cj.id < bid)) {
                    best = Some((d, cj.id, j));
                }
            }
            let (distance, target, j) = best.expect("at least two clusters");
            let (_, lo, hi) = closest_pair(&ci.members, &clusters[j].members, &src);
            Nearest {
                target,
                distance,
                pair: orient(lo, hi, &ci.members),
            }
        });
    Ok(result)
}

/// For every cluster, the nearest other cluster when each cluster is
/// represented by its feature mean. Means are indexed in a k-d tree; the
/// reported distance is euclidean between means, ties go to the smallest
/// cluster id. The realizing pair is the smallest member of each cluster.
pub fn nearest_clusters_approx(clusters: &[Cluster], input: &Input) -> Result<Vec<Nearest>> {
    if clusters.len() < 2 {
        return Err(Error::State(
            "nearest-cluster query needs at least two clusters".into(),
        ));
    }
    input.check_linkage(Linkage::MeanRepresentative)?;
    let data = input.dataset().expect("checked above");
    let dim = data.dim();
    let mut means = Vec::with_capacity(clusters.len() * dim);
    for c in clusters {
        means.extend(mean_of(&c.members, data));
    }
    let ids: Vec<usize> = clusters.iter().map(|c| c.id).collect();
    let tree = KdTree::build(&means, dim, &ids);
    let result = par::map_range(clusters.len(), |i| {
            let (j, d2) = tree.nearest_other(i).expect("at least two clusters");
            Nearest {
                target: ids[j],
                distance: d2.sqrt(),
                pair: (clusters[i].members[0], clusters[j].members[0]),
            }
        });
    Ok(result)
}
