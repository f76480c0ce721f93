//! Domain types shared by the engine, the cut strategies and the front ends.

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSet;
use crate::error::{Error, MatrixViolation, Result};

/// Tolerance used when checking ingested matrices for symmetry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Row-major `n x d` table of finite features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer.
    pub fn from_flat(values: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::input(format!(
                "buffer of {} values does not hold {n} rows of {d} features",
                values.len()
            )));
        }
        if d == 0 && n > 0 {
            return Err(Error::input("rows must have at least one feature"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite feature at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Dataset { values, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::input(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Dataset::from_flat(values, rows.len(), d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }
}

/// Dense symmetric matrix of pairwise dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    entries: Vec<f64>,
    n: usize,
}

impl DistanceMatrix {
    /// Builds and validates a matrix from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "distance matrix is not square: row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let m = DistanceMatrix { entries, n };
        m.validate().map_err(Error::Matrix)?;
        Ok(m)
    }

    /// Wraps a buffer produced by a distance kernel. The caller guarantees
    /// the matrix invariants.
    pub(crate) fn from_trusted(entries: Vec<f64>, n: usize) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        DistanceMatrix { entries, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Checks finiteness, nonnegativity, a zero diagonal and symmetry, in
    /// that order for each entry, scanning row-major.
    pub fn validate(&self) -> Result<(), MatrixViolation> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(MatrixViolation::NonFinite { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(MatrixViolation::Negative {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                if i == j && v != 0.0 {
                    return Err(MatrixViolation::NonzeroDiagonal { index: i, value: v });
                }
                if j > i {
                    let w = self.get(j, i);
                    if w.is_finite() && (v - w).abs() > SYMMETRY_TOLERANCE {
                        return Err(MatrixViolation::Asymmetric {
                            row: i,
                            col: j,
                            upper: v,
                            lower: w,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Checks a raw square table against the distance-matrix invariants.
///
/// A non-square table is an input error; a square one that breaks an
/// invariant yields `Err(Error::Matrix(..))` naming the first offending entry.
pub fn validate_distance_matrix(rows: &[Vec<f64>]) -> Result<()> {
    DistanceMatrix::from_rows(rows).map(|_| ())
}

/// A set of samples treated as one body. Its mass is its member count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub id: usize,
    /// Sorted sample indices.
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn singleton(id: usize, sample: usize) -> Self {
        Cluster {
            id,
            members: vec![sample],
        }
    }

    pub fn new(id: usize, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Cluster { id, members }
    }

    pub fn mass(&self) -> u64 {
        self.members.len() as u64
    }
}

/// One merge edge revealed during a run, with its torque properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub id: usize,
    pub round: usize,
    pub from_cluster: usize,
    pub to_cluster: usize,
    pub from_mass: u64,
    pub to_mass: u64,
    /// Inter-cluster distance under the run's linkage.
    pub distance: f64,
    /// Product of the endpoint masses.
    pub mass_product: u64,
    /// Squared inter-cluster distance.
    pub distance_sq: f64,
    /// `mass_product * distance_sq`.
    pub gamma: f64,
    /// Set when the endpoints were already joined earlier in the same round;
    /// such an edge closes a cycle and never affects a cut.
    pub redundant: bool,
    /// Sample pair `[from_sample, to_sample]` that realizes the edge at the
    /// sample level.
    pub pair: [usize; 2],
}

/// Torque properties of a connection: mass product, squared distance and
/// their product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionProperties {
    pub mass_product: u64,
    pub distance_sq: f64,
    pub gamma: f64,
}

impl ConnectionProperties {
    pub fn new(from_mass: u64, to_mass: u64, distance: f64) -> Self {
        Self::from_squared(from_mass, to_mass, distance * distance)
    }

    /// Same as [`ConnectionProperties::new`] when the squared distance is
    /// already known exactly.
    pub fn from_squared(from_mass: u64, to_mass: u64, distance_sq: f64) -> Self {
        let mass_product = from_mass * to_mass;
        ConnectionProperties {
            mass_product,
            distance_sq,
            gamma: mass_product as f64 * distance_sq,
        }
    }
}

/// Shorthand for [`ConnectionProperties::new`].
pub fn connection_properties(from_mass: u64, to_mass: u64, distance: f64) -> ConnectionProperties {
    ConnectionProperties::new(from_mass, to_mass, distance)
}

/// Flat clustering: one label per sample, labels `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Partition {
    /// Cluster sizes indexed by label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Output of a full run: every connection of every round plus the number of
/// clusters alive at the start of each round and at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorqueResult {
    pub n: usize,
    pub connections: Vec<Connection>,
    /// Cluster count per hierarchy layer, starting at `n` and ending at 1.
    pub rounds: Vec<usize>,
    pub final_cluster_count: usize,
}

impl TorqueResult {
    pub fn connection(&self, id: usize) -> Option<&Connection> {
        // ids are dense and assigned in log order
        self.connections.get(id).filter(|c| c.id == id)
    }

    /// Number of merge rounds performed.
    pub fn round_count(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }

    pub fn non_redundant(&self) -> impl Iterator<Item = &Connection> + '_ {
        self.connections.iter().filter(|c| !c.redundant)
    }
}

/// Labels samples by connected component of the undirected graph on `0..n`
/// with the given edges. Labels are numbered in order of each component's
/// smallest sample index.
pub fn partition_from_components(n: usize, edges: &[(usize, usize)]) -> Result<Partition> {
    let mut ds = DisjointSet::new(n);
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::input(format!(
                "edge ({a},{b}) has an endpoint outside 0..{n}"
            )));
        }
        ds.union(a, b);
    }
    Ok(canonical_labels(&mut ds))
}

pub(crate) fn canonical_labels(ds: &mut DisjointSet) -> Partition {
    let n = ds.len();
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        let r = ds.find(i);
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = k;
            k += 1;
        }
        labels.push(label_of_root[r]);
    }
    Partition { labels, k }
}
