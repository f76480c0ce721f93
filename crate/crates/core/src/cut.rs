//! Turning a merge log into a flat partition by removing abnormal
//! connections.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSet;
use crate::error::{Error, Result};
use crate::model::{canonical_labels, Connection, Partition, TorqueResult};

/// Which connections to remove.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CutSpec {
    #[default]
    /// Connections whose mass product and squared distance are both at or
    /// above their means over the whole log.
    Auto,
    /// Largest-torque connections until `k` clusters remain.
    TopK { k: usize },
    /// An explicit id set.
    Manual { ids: BTreeSet<usize> },
}

impl FromStr for CutSpec {
    type Err = Error;

    /// Parses `auto` or `topk:K`. Manual id sets come from a file and are
    /// built by the caller.
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(CutSpec::Auto);
        }
        if let Some(k) = s.strip_prefix("topk:") {
            let k = k
                .parse()
                .map_err(|_| Error::input(format!("invalid cluster count in '{s}'")))?;
            return Ok(CutSpec::TopK { k });
        }
        Err(Error::input(format!("unknown cut mode '{s}'")))
    }
}

impl fmt::Display for CutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutSpec::Auto => f.write_str("auto"),
            CutSpec::TopK { k } => write!(f, "topk:{k}"),
            CutSpec::Manual { ids } => write!(f, "manual:{} ids", ids.len()),
        }
    }
}

/// Mean-threshold cut: removes every connection with mass product and
/// squared distance both at or above the respective means over all logged
/// connections, redundant ones included.
pub fn auto_cut(connections: &[Connection]) -> BTreeSet<usize> {
    if connections.is_empty() {
        return BTreeSet::new();
    }
    let count = connections.len() as f64;
    let mean_m = connections.iter().map(|c| c.mass_product as f64).sum::<f64>() / count;
    let mean_d = connections.iter().map(|c| c.distance_sq).sum::<f64>() / count;
    connections
        .iter()
        .filter(|c| c.mass_product as f64 >= mean_m && c.distance_sq >= mean_d)
        .map(|c| c.id)
        .collect()
}

/// One row of the torque ranking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedConnection {
    /// 1-based.
    pub rank: usize,
    pub id: usize,
    pub gamma: f64,
    pub redundant: bool,
}

/// Connections by torque, largest first; equal torque keeps id order.
pub fn gamma_ranking(connections: &[Connection]) -> Vec<RankedConnection> {
    let mut order: Vec<&Connection> = connections.iter().collect();
    order.sort_by(|a, b| b.gamma.total_cmp(&a.gamma).then(a.id.cmp(&b.id)));
    order
        .into_iter()
        .enumerate()
        .map(|(i, c)| RankedConnection {
            rank: i + 1,
            id: c.id,
            gamma: c.gamma,
            redundant: c.redundant,
        })
        .collect()
}

/// Removes the largest-torque non-redundant connections until `k` clusters
/// remain. Redundant connections are passed over since removing one never
/// splits a cluster.
pub fn topk_cut(result: &TorqueResult, k: usize) -> Result<BTreeSet<usize>> {
    if k == 0 || k > result.n {
        return Err(Error::input(format!(
            "cluster count {k} is outside 1..={}",
            result.n
        )));
    }
    Ok(gamma_ranking(&result.connections)
        .into_iter()
        .filter(|r| !r.redundant)
        .take(k - 1)
        .map(|r| r.id)
        .collect())
}

/// A validated manual removal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManualCut {
    pub removed: BTreeSet<usize>,
    /// Ids of redundant connections in the set; removing them has no effect.
    pub redundant: Vec<usize>,
}

impl ManualCut {
    pub fn warnings(&self) -> Vec<String> {
        self.redundant
            .iter()
            .map(|id| format!("connection {id} is redundant; removing it cannot change the partition"))
            .collect()
    }
}

pub fn manual_cut(connections: &[Connection], ids: &BTreeSet<usize>) -> Result<ManualCut> {
    let mut redundant = Vec::new();
    for &id in ids {
        let c = connections
            .get(id)
            .filter(|c| c.id == id)
            .or_else(|| connections.iter().find(|c| c.id == id))
            .ok_or(Error::UnknownConnection(id))?;
        if c.redundant {
            redundant.push(id);
        }
    }
    Ok(ManualCut {
        removed: ids.clone(),
        redundant,
    })
}

/// Partition left after deleting `removed` from the non-redundant
/// connections, read at the sample level through each connection's
/// realizing pair.
pub fn apply_cut(result: &TorqueResult, removed: &BTreeSet<usize>) -> Result<Partition> {
    if let Some(&bad) = removed.iter().find(|&&id| result.connection(id).is_none()) {
        return Err(Error::UnknownConnection(bad));
    }
    let mut ds = DisjointSet::new(result.n);
    for c in result.non_redundant() {
        if !removed.contains(&c.id) {
            ds.union(c.pair[0], c.pair[1]);
        }
    }
    Ok(canonical_labels(&mut ds))
}

/// Outcome of resolving a [`CutSpec`] against a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CutOutcome {
    pub removed: BTreeSet<usize>,
    pub partition: Partition,
    pub warnings: Vec<String>,
}

pub fn cut(result: &TorqueResult, spec: &CutSpec) -> Result<CutOutcome> {
    let (removed, warnings) = match spec {
        CutSpec::Auto => (auto_cut(&result.connections), Vec::new()),
        CutSpec::TopK { k } => (topk_cut(result, *k)?, Vec::new()),
        CutSpec::Manual { ids } => {
            let m = manual_cut(&result.connections, ids)?;
            let warnings = m.warnings();
            (m.removed, warnings)
        }
    };
    let partition = apply_cut(result, &removed)?;
    Ok(CutOutcome {
        removed,
        partition,
        warnings,
    })
}
