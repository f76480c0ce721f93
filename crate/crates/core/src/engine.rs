//! The merge loop.
//!
//! Each round every cluster looks up its nearest other cluster; a cluster
//! links to that neighbour only when its own mass does not exceed the
//! neighbour's. The connected components of those links become the next
//! round's clusters. Every link is logged with its mass product, squared
//! distance and torque, and the loop stops once a single cluster remains.

use std::collections::HashMap;

use crate::dsu::DisjointSet;
use crate::par;
use crate::error::{Error, Result};
use crate::linkage::{
    key_less, nearest_clusters_approx, nearest_clusters_exact, orient, pair_key, Input, Linkage,
    Nearest, PairKey, Source,
};
use crate::model::{Cluster, Connection, ConnectionProperties, TorqueResult};

/// Largest cluster count for which single linkage keeps a pairwise
/// cluster-distance table. Above it each round rescans sample pairs.
pub const DEFAULT_PAIR_CACHE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub linkage: Linkage,
    pub pair_cache_limit: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            linkage: Linkage::Single,
            pair_cache_limit: DEFAULT_PAIR_CACHE_LIMIT,
        }
    }
}

impl From<Linkage> for RunOptions {
    fn from(linkage: Linkage) -> Self {
        RunOptions {
            linkage,
            ..RunOptions::default()
        }
    }
}

/// A link from a cluster to its nearest neighbour that passed the mass test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedConnection {
    pub from: usize,
    pub to: usize,
    pub from_mass: u64,
    pub to_mass: u64,
    pub distance: f64,
    /// `(sample in from, sample in to)`.
    pub pair: (usize, usize),
}

/// Emits `from -> nearest` for every cluster whose mass does not exceed the
/// mass of its nearest cluster. `nearest[i]` belongs to `clusters[i]`.
pub fn form_connections(clusters: &[Cluster], nearest: &[Nearest]) -> Vec<DirectedConnection> {
    assert_eq!(clusters.len(), nearest.len());
    let mass: HashMap<usize, u64> = clusters.iter().map(|c| (c.id, c.mass())).collect();
    clusters
        .iter()
        .zip(nearest)
        .filter_map(|(c, nn)| {
            let to_mass = mass[&nn.target];
            (c.mass() <= to_mass).then_some(DirectedConnection {
                from: c.id,
                to: nn.target,
                from_mass: c.mass(),
                to_mass,
                distance: nn.distance,
                pair: nn.pair,
            })
        })
        .collect()
}

/// Mutable state of a run between rounds.
#[derive(Debug, Clone)]
pub struct EngineState {
    clusters: Vec<Cluster>,
    round: usize,
    union: DisjointSet,
    log: Vec<Connection>,
    rounds: Vec<usize>,
    next_cluster_id: usize,
    cache: Option<PairCache>,
}

impl EngineState {
    /// `n` singleton clusters with ids `0..n`.
    pub fn new(n: usize) -> Self {
        EngineState {
            clusters: (0..n).map(|i| Cluster::singleton(i, i)).collect(),
            round: 0,
            union: DisjointSet::new(n),
            log: Vec::new(),
            rounds: vec![n],
            next_cluster_id: n,
            cache: None,
        }
    }

    /// Current clusters, sorted by id.
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn log(&self) -> &[Connection] {
        &self.log
    }

    /// Cluster count at the start and after each completed round.
    pub fn rounds(&self) -> &[usize] {
        &self.rounds
    }

    pub fn n(&self) -> usize {
        self.union.len()
    }

    /// Whether samples `a` and `b` are already joined.
    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.union.same(a, b)
    }

    pub fn into_result(self) -> TorqueResult {
        TorqueResult {
            n: self.union.len(),
            final_cluster_count: self.clusters.len(),
            connections: self.log,
            rounds: self.rounds,
        }
    }
}

/// Collapses mutual links into one undirected connection, assigns ids and
/// torque properties, and flags links whose endpoints are already joined.
///
/// Links are processed in ascending `(lower id, higher id)` order. Every
/// non-redundant link is applied to the state's sample-level union.
pub fn dedupe_and_classify(
    mut directed: Vec<DirectedConnection>,
    state: &mut EngineState,
) -> Vec<Connection> {
    directed.sort_by_key(|c| (c.from.min(c.to), c.from.max(c.to), c.from));
    directed.dedup_by_key(|c| (c.from.min(c.to), c.from.max(c.to)));
    let mut out = Vec::with_capacity(directed.len());
    for c in directed {
        let props = ConnectionProperties::new(c.from_mass, c.to_mass, c.distance);
        let redundant = !state.union.union(c.pair.0, c.pair.1);
        let connection = Connection {
            id: state.log.len() + out.len(),
            round: state.round,
            from_cluster: c.from,
            to_cluster: c.to,
            from_mass: c.from_mass,
            to_mass: c.to_mass,
            distance: c.distance,
            mass_product: props.mass_product,
            distance_sq: props.distance_sq,
            gamma: props.gamma,
            redundant,
            pair: [c.pair.0, c.pair.1],
        };
        out.push(connection);
    }
    out
}

/// Runs one round on `state`.
pub fn merge_round(mut state: EngineState, input: &Input, options: RunOptions) -> Result<EngineState> {
    state.step(input, options)?;
    Ok(state)
}

impl EngineState {
    /// Performs one merge round in place.
    pub fn step(&mut self, input: &Input, options: RunOptions) -> Result<()> {
        if self.clusters.len() < 2 {
            return Err(Error::State(format!(
                "merge round needs at least two clusters, found {}",
                self.clusters.len()
            )));
        }
        if input.n() != self.n() {
            return Err(Error::input(format!(
                "input has {} samples but the state tracks {}",
                input.n(),
                self.n()
            )));
        }
        let nearest = self.nearest(input, options)?;
        let directed = form_connections(&self.clusters, &nearest);
        let connections = dedupe_and_classify(directed, self);
        self.log.extend(connections);
        self.regroup(input, options);
        self.round += 1;
        self.rounds.push(self.clusters.len());
        Ok(())
    }

    fn nearest(&self, input: &Input, options: RunOptions) -> Result<Vec<Nearest>> {
        match options.linkage {
            Linkage::Single => {
                let src = input.source();
                Ok(match &self.cache {
                    Some(cache) => cache.nearest(&self.clusters),
                    None => self.nearest_by_sample_scan(&src),
                })
            }
            Linkage::MeanRepresentative => nearest_clusters_approx(&self.clusters, input),
            other => nearest_clusters_exact(&self.clusters, input, other),
        }
    }

    /// Single-linkage nearest clusters straight from sample pairs.
    fn nearest_by_sample_scan(&self, src: &Source<'_>) -> Vec<Nearest> {
        let n = self.n();
        let owner = self.owner_positions();
        // per sample: best (distance, target position, lo, hi)
        let per_sample: Vec<(f64, usize, usize, usize)> = par::map_range(n, |s| {
                let own = owner[s];
                let mut best = (f64::INFINITY, usize::MAX, usize::MAX, usize::MAX);
                for (t, &pos) in owner.iter().enumerate() {
                    if pos == own {
                        continue;
                    }
                    let (d, lo, hi) = pair_key(src.dist(s, t), s, t);
                    let cand = (d, pos, lo, hi);
                    if scan_less(&cand, &best) {
                        best = cand;
                    }
                }
                best
            });
        self.clusters
            .iter()
            .map(|c| {
                let mut best = (f64::INFINITY, usize::MAX, usize::MAX, usize::MAX);
                for &m in &c.members {
                    if scan_less(&per_sample[m], &best) {
                        best = per_sample[m];
                    }
                }
                let (distance, pos, lo, hi) = best;
                Nearest {
                    target: self.clusters[pos].id,
                    distance,
                    pair: orient(lo, hi, &c.members),
                }
            })
            .collect()
    }

    fn owner_positions(&self) -> Vec<usize> {
        let mut owner = vec![0; self.n()];
        for (pos, c) in self.clusters.iter().enumerate() {
            for &m in &c.members {
                owner[m] = pos;
            }
        }
        owner
    }

    /// Replaces the cluster list by the union's components. Clusters that
    /// absorbed others get fresh ids in order of their smallest sample;
    /// untouched clusters keep theirs.
    fn regroup(&mut self, input: &Input, options: RunOptions) {
        let old = std::mem::take(&mut self.clusters);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of_root: HashMap<usize, usize> = HashMap::new();
        for (pos, c) in old.iter().enumerate() {
            let root = self.union.find(c.members[0]);
            let g = *group_of_root.entry(root).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(pos);
        }

        let mut kept: Vec<(usize, Cluster, Vec<usize>)> = Vec::new();
        let mut merged: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
        for g in groups {
            if g.len() == 1 {
                let c = old[g[0]].clone();
                kept.push((c.id, c, g));
            } else {
                let mut members: Vec<usize> =
                    g.iter().flat_map(|&p| old[p].members.iter().copied()).collect();
                members.sort_unstable();
                merged.push((members[0], members, g));
            }
        }
        kept.sort_by_key(|k| k.0);
        merged.sort_by_key(|m| m.0);

        let mut new_pos_of_old = vec![0; old.len()];
        let mut clusters = Vec::with_capacity(kept.len() + merged.len());
        for (_, c, g) in kept {
            new_pos_of_old[g[0]] = clusters.len();
            clusters.push(c);
        }
        for (_, members, g) in merged {
            for p in g {
                new_pos_of_old[p] = clusters.len();
            }
            clusters.push(Cluster {
                id: self.next_cluster_id,
                members,
            });
            self.next_cluster_id += 1;
        }
        self.clusters = clusters;

        self.cache = match options.linkage {
            Linkage::Single if self.clusters.len() >= 2 && self.clusters.len() <= options.pair_cache_limit => {
                Some(match self.cache.take() {
                    Some(old_cache) => old_cache.coarsen(&new_pos_of_old, self.clusters.len()),
                    None => PairCache::from_samples(&self.clusters, &input.source()),
                })
            }
            _ => None,
        };
    }
}

#[inline]
fn scan_less(a: &(f64, usize, usize, usize), b: &(f64, usize, usize, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && (a.1, a.2, a.3) < (b.1, b.2, b.3))
}

/// Single-linkage distances between every pair of current clusters, stored
/// as the strict upper triangle indexed by cluster position.
#[derive(Debug, Clone)]
struct PairCache {
    len: usize,
    entries: Vec<PairKey>,
}

impl PairCache {
    fn empty(len: usize) -> Self {
        PairCache {
            len,
            entries: vec![(f64::INFINITY, usize::MAX, usize::MAX); len * len.saturating_sub(1) / 2],
        }
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.len - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> &PairKey {
        &self.entries[self.index(i, j)]
    }

    #[inline]
    fn offer(&mut self, i: usize, j: usize, key: PairKey) {
        let idx = self.index(i, j);
        if key_less(&key, &self.entries[idx]) {
            self.entries[idx] = key;
        }
    }

    fn from_samples(clusters: &[Cluster], src: &Source<'_>) -> Self {
        let mut owner = Vec::new();
        for (pos, c) in clusters.iter().enumerate() {
            for &m in &c.members {
                if owner.len() <= m {
                    owner.resize(m + 1, 0);
                }
                owner[m] = pos;
            }
        }
        let mut cache = PairCache::empty(clusters.len());
        let n = owner.len();
        for s in 0..n {
            for t in s + 1..n {
                if owner[s] != owner[t] {
                    cache.offer(owner[s], owner[t], (src.dist(s, t), s, t));
                }
            }
        }
        cache
    }

    /// Table for the merged clusters: the single-linkage distance from a
    /// union to any other cluster is the minimum over its parts.
    fn coarsen(&self, new_pos_of_old: &[usize], new_len: usize) -> Self {
        let mut next = PairCache::empty(new_len);
        for i in 0..self.len {
            for j in i + 1..self.len {
                let (a, b) = (new_pos_of_old[i], new_pos_of_old[j]);
                if a != b {
                    next.offer(a, b, *self.get(i, j));
                }
            }
        }
        next
    }

    fn nearest(&self, clusters: &[Cluster]) -> Vec<Nearest> {
        debug_assert_eq!(clusters.len(), self.len);
        par::map_range(self.len, |i| {
                // positions follow ids, so the first strict minimum is the smallest id
                let mut best: Option<(usize, &PairKey)> = None;
                for j in 0..self.len {
                    if j == i {
                        continue;
                    }
                    let k = self.get(i, j);
                    if best.is_none_or(|(_, b)| k.0 < b.0) {
                        best = Some((j, k));
                    }
                }
                let (j, &(distance, lo, hi)) = best.expect("at least two clusters");
                Nearest {
                    target: clusters[j].id,
                    distance,
                    pair: orient(lo, hi, &clusters[i].members),
                }
            })
    }
}

/// Clusters `input` from singletons until one cluster remains.
pub fn run(input: &Input, options: impl Into<RunOptions>) -> Result<TorqueResult> {
    let options = options.into();
    let n = input.n();
    if n == 0 {
        return Err(Error::input("cannot cluster an empty dataset"));
    }
    input.check_linkage(options.linkage)?;
    let mut state = EngineState::new(n);
    while state.clusters.len() >= 2 {
        state.step(input, options)?;
    }
    Ok(state.into_result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::Metric;
    use crate::model::{Dataset, DistanceMatrix};

    fn points(rows: &[[f64; 2]]) -> Input {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        Input::points(Dataset::from_rows(&rows).unwrap(), Metric::Euclidean).unwrap()
    }

    fn cluster_of_mass(id: usize, start: usize, mass: usize) -> Cluster {
        Cluster::new(id, (start..start + mass).collect())
    }

    fn nn(target: usize, distance: f64) -> Nearest {
        Nearest {
            target,
            distance,
            pair: (0, 0),
        }
    }

    #[test]
    fn lighter_cluster_links_to_heavier() {
        let clusters = vec![cluster_of_mass(0, 0, 15), cluster_of_mass(1, 15, 2)];
        let out = form_connections(&clusters, &[nn(1, 0.8), nn(0, 0.8)]);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].from, out[0].to), (1, 0));
        assert_eq!((out[0].from_mass, out[0].to_mass), (2, 15));
    }

    #[test]
    fn equal_masses_link_both_ways() {
        let clusters = vec![cluster_of_mass(0, 0, 17), cluster_of_mass(1, 17, 17)];
        let out = form_connections(&clusters, &[nn(1, 4.0), nn(0, 4.0)]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn first_round_table_rows() {
        // galaxies with masses 15, 2, 10, 3, 2, 2, 16 and their nearest galaxies
        let masses = [15, 2, 10, 3, 2, 2, 16];
        let mut start = 0;
        let clusters: Vec<Cluster> = masses
            .iter()
            .enumerate()
            .map(|(id, &m)| {
                let c = cluster_of_mass(id, start, m);
                start += m;
                c
            })
            .collect();
        let nearest = [nn(1, 0.8), nn(0, 0.8), nn(4, 0.8), nn(2, 1.0), nn(2, 0.8), nn(2, 1.2), nn(0, 3.0)];
        let out = form_connections(&clusters, &nearest);
        let emitted: Vec<(usize, usize, u64)> = out
            .iter()
            .map(|c| (c.from, c.to, c.from_mass * c.to_mass))
            .collect();
        assert_eq!(emitted, vec![(1, 0, 30), (3, 2, 30), (4, 2, 20), (5, 2, 20)]);
    }

    fn directed(from: usize, to: usize, pair: (usize, usize)) -> DirectedConnection {
        DirectedConnection {
            from,
            to,
            from_mass: 1,
            to_mass: 1,
            distance: 1.0,
            pair,
        }
    }

    #[test]
    fn mutual_pair_collapses() {
        let mut state = EngineState::new(2);
        let out = dedupe_and_classify(vec![directed(1, 0, (1, 0)), directed(0, 1, (0, 1))], &mut state);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].from_cluster, out[0].to_cluster), (0, 1));
        assert!(!out[0].redundant);
    }

    #[test]
    fn triangle_has_one_redundant_edge() {
        let mut state = EngineState::new(3);
        let out = dedupe_and_classify(
            vec![directed(0, 1, (0, 1)), directed(1, 2, (1, 2)), directed(2, 0, (2, 0))],
            &mut state,
        );
        // processing order (0,1), (0,2), (1,2): the last closes the cycle
        let flags: Vec<(usize, usize, bool)> = out
            .iter()
            .map(|c| (c.from_cluster, c.to_cluster, c.redundant))
            .collect();
        assert_eq!(flags, vec![(0, 1, false), (2, 0, false), (1, 2, true)]);
        assert_eq!(out.iter().map(|c| c.id).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn disjoint_pairs_are_kept() {
        let mut state = EngineState::new(4);
        let out = dedupe_and_classify(vec![directed(0, 1, (0, 1)), directed(2, 3, (2, 3))], &mut state);
        assert!(out.iter().all(|c| !c.redundant));
    }

    #[test]
    fn single_sample_run() {
        let r = run(&points(&[[1.0, 1.0]]), Linkage::Single).unwrap();
        assert!(r.connections.is_empty());
        assert_eq!(r.rounds, vec![1]);
        assert_eq!(r.final_cluster_count, 1);
    }

    #[test]
    fn two_sample_run() {
        let m = DistanceMatrix::from_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        let r = run(&Input::Matrix(m), Linkage::Single).unwrap();
        assert_eq!(r.connections.len(), 1);
        let c = &r.connections[0];
        assert_eq!((c.mass_product, c.distance_sq), (1, 9.0));
        assert_eq!(r.rounds, vec![2, 1]);
    }

    #[test]
    fn empty_input_is_rejected() {
        let input = Input::points(Dataset::from_flat(vec![], 0, 2).unwrap(), Metric::Euclidean).unwrap();
        assert!(matches!(run(&input, Linkage::Single), Err(Error::Input(_))));
    }

    #[test]
    fn merge_round_needs_two_clusters() {
        let input = points(&[[0.0, 0.0]]);
        let err = merge_round(EngineState::new(1), &input, RunOptions::default()).unwrap_err();
        assert!(matches!(err, Error::State(_)));
    }

    #[test]
    fn two_singletons_merge_in_one_round() {
        let input = points(&[[0.0, 0.0], [1.0, 0.0]]);
        let state = merge_round(EngineState::new(2), &input, RunOptions::default()).unwrap();
        assert_eq!(state.clusters().len(), 1);
        assert_eq!(state.clusters()[0].mass(), 2);
        assert_eq!(state.clusters()[0].id, 2);
        assert_eq!(state.round(), 1);
    }

    #[test]
    fn duplicate_points_merge_first_with_zero_torque() {
        let input = points(&[[0.0, 0.0], [0.0, 0.0], [5.0, 0.0]]);
        let r = run(&input, Linkage::Single).unwrap();
        let first = &r.connections[0];
        assert_eq!(first.round, 0);
        assert_eq!((first.distance_sq, first.gamma), (0.0, 0.0));
    }

    #[test]
    fn cache_and_sample_scan_agree() {
        let rows: Vec<[f64; 2]> = (0..60)
            .map(|i| {
                let t = i as f64;
                [(t * 1.37).sin() * 10.0 + (i % 3) as f64 * 20.0, (t * 0.71).cos() * 7.0]
            })
            .collect();
        let input = points(&rows);
        let cached = run(&input, RunOptions::default()).unwrap();
        let scanned = run(
            &input,
            RunOptions {
                linkage: Linkage::Single,
                pair_cache_limit: 0,
            },
        )
        .unwrap();
        assert_eq!(cached, scanned);
    }

    #[test]
    fn every_linkage_reaches_one_cluster() {
        let rows: Vec<[f64; 2]> = (0..40).map(|i| [(i * i % 17) as f64, (i * 7 % 11) as f64]).collect();
        let input = points(&rows);
        for linkage in [
            Linkage::Single,
            Linkage::Complete,
            Linkage::Average,
            Linkage::Centroid,
            Linkage::MeanRepresentative,
        ] {
            let r = run(&input, linkage).unwrap();
            assert_eq!(*r.rounds.last().unwrap(), 1, "{linkage}");
            assert_eq!(r.non_redundant().count(), 39, "{linkage}");
        }
    }
}
