//! Demo state, independent of the browser bindings so it can be tested
//! natively.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::Serialize;
use torque::cut::{auto_cut, topk_cut};
use torque::io::{parse_input, ConnectionRecord};
use torque::projection::project_2d;
use torque::{apply_cut, synth, Dataset, Input, Linkage, Metric, Partition, TorqueResult};

/// Partition view returned after every cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutView {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub removed: Vec<usize>,
    pub labels: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct DemoSession {
    data: Dataset,
    truth: Option<Vec<usize>>,
    result: TorqueResult,
    removed: BTreeSet<usize>,
    partition: Partition,
    warnings: Vec<String>,
}

/// `groups` isotropic blobs of unit spread, centres evenly spaced on a
/// circle wide enough to keep neighbours about ten deviations apart. Group
/// sizes vary so the masses differ.
pub fn demo_blobs(groups: usize, seed: u64) -> (Dataset, Vec<usize>) {
    let groups = groups.clamp(1, 8);
    let radius = if groups == 1 {
        0.0
    } else {
        // chord between neighbours = 2 r sin(pi / g) = 12
        6.0 / (TAU / (2.0 * groups as f64)).sin()
    };
    let centers: Vec<Vec<f64>> = (0..groups)
        .map(|g| {
            let a = TAU * g as f64 / groups as f64;
            vec![radius * a.cos(), radius * a.sin()]
        })
        .collect();
    let counts: Vec<usize> = (0..groups).map(|g| 40 + 15 * ((g * 7 + seed as usize) % 5)).collect();
    synth::gaussian_blobs(&centers, &counts, 1.0, seed)
}

impl DemoSession {
    pub fn run(data: Dataset, truth: Option<Vec<usize>>) -> torque::Result<Self> {
        let input = Input::points(data.clone(), Metric::Euclidean)?;
        let result = torque::run(&input, Linkage::Single)?;
        let removed = auto_cut(&result.connections);
        let partition = apply_cut(&result, &removed)?;
        Ok(Self {
            data,
            truth,
            result,
            removed,
            partition,
            warnings: Vec::new(),
        })
    }

    pub fn generate(groups: usize, seed: u64) -> torque::Result<Self> {
        let (data, truth) = demo_blobs(groups, seed);
        Self::run(data, Some(truth))
    }

    /// Feature rows as CSV, optionally with a label column.
    pub fn from_csv(text: &str, label_col: Option<usize>) -> torque::Result<Self> {
        let (input, labels) = parse_input(text, None, Some(Metric::Euclidean), label_col)?;
        let data = input.dataset().cloned().expect("points input");
        let truth = labels.map(|l| dense_labels(&l));
        Self::run(data, truth)
    }

    pub fn n(&self) -> usize {
        self.result.n
    }

    pub fn result(&self) -> &TorqueResult {
        &self.result
    }

    pub fn truth(&self) -> Option<&[usize]> {
        self.truth.as_deref()
    }

    pub fn records(&self) -> Vec<ConnectionRecord> {
        self.result.connections.iter().map(ConnectionRecord::from).collect()
    }

    /// Planar coordinates, flattened as x0, y0, x1, y1, ...
    pub fn coordinates(&self) -> Vec<f64> {
        project_2d(&self.data).into_iter().flatten().collect()
    }

    pub fn view(&self) -> CutView {
        CutView {
            k: self.partition.k,
            sizes: self.partition.sizes(),
            removed: self.removed.iter().copied().collect(),
            labels: self.partition.labels.clone(),
            warnings: self.warnings.clone(),
        }
    }

    fn apply(&mut self, removed: BTreeSet<usize>, warnings: Vec<String>) -> torque::Result<CutView> {
        self.partition = apply_cut(&self.result, &removed)?;
        self.removed = removed;
        self.warnings = warnings;
        Ok(self.view())
    }

    pub fn cut_auto(&mut self) -> CutView {
        let removed = auto_cut(&self.result.connections);
        self.apply(removed, Vec::new()).expect("auto cut ids are logged")
    }

    pub fn cut_topk(&mut self, k: usize) -> torque::Result<CutView> {
        let removed = topk_cut(&self.result, k)?;
        self.apply(removed, Vec::new())
    }

    pub fn clear(&mut self) -> CutView {
        self.apply(BTreeSet::new(), Vec::new()).expect("empty cut")
    }

    /// Adds or removes one connection from the removed set.
    pub fn toggle(&mut self, id: usize) -> torque::Result<CutView> {
        let c = self.result.connection(id).ok_or(torque::Error::UnknownConnection(id))?;
        let mut removed = self.removed.clone();
        if !removed.remove(&id) {
            removed.insert(id);
        }
        let warnings = if c.redundant {
            vec![format!("connection {id} is redundant; toggling it does not change the partition")]
        } else {
            Vec::new()
        };
        self.apply(removed, warnings)
    }

    /// NMI of the current partition against the generating labels.
    pub fn nmi(&self) -> Option<f64> {
        let truth = self.truth.as_ref()?;
        torque::metrics::nmi(&self.partition.labels, truth).ok()
    }
}

fn dense_labels(raw: &[i64]) -> Vec<usize> {
    let distinct: BTreeSet<i64> = raw.iter().copied().collect();
    let index: Vec<i64> = distinct.into_iter().collect();
    raw.iter()
        .map(|l| index.binary_search(l).expect("label present"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_layout() {
        let (data, truth) = demo_blobs(3, 1);
        assert_eq!(data.n(), truth.len());
        assert_eq!(truth.iter().max(), Some(&2));
        let (one, _) = demo_blobs(1, 1);
        assert!(one.n() > 0);
        // out-of-range counts are clamped
        let (_, t) = demo_blobs(50, 1);
        assert_eq!(t.iter().max(), Some(&7));
    }

    #[test]
    fn dense_label_mapping() {
        assert_eq!(dense_labels(&[7, -1, 7, 3]), vec![2, 0, 2, 1]);
    }
}
