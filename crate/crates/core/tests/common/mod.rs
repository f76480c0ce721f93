#![allow(dead_code)]

//! Test-only references that share no code path with the engine.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torque::{Connection, ConnectionProperties, Dataset, TorqueResult};

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// Brute-force single-linkage run that recomputes every cluster-pair distance
/// from raw points in every round.
pub struct NaiveRun {
    pub connections: Vec<Connection>,
    pub rounds: Vec<usize>,
}

pub fn naive_single_linkage(points: &[Vec<f64>]) -> NaiveRun {
    let n = points.len();
    // (id, members) sorted by id
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut next_id = n;
    let mut label: Vec<usize> = (0..n).collect();
    let mut connections = Vec::new();
    let mut rounds = vec![n];
    let mut round = 0;
    while clusters.len() > 1 {
        // nearest cluster of each cluster
        let mut edges: BTreeMap<(usize, usize), Connection> = BTreeMap::new();
        for (ia, (ida, ma)) in clusters.iter().enumerate() {
            let mut best: Option<(f64, usize, usize, usize, usize)> = None; // d, id, jb, lo, hi
            for (jb, (idb, mb)) in clusters.iter().enumerate() {
                if ia == jb {
                    continue;
                }
                let mut pair_best: Option<(f64, usize, usize)> = None;
                for &x in ma {
                    for &y in mb {
                        let (lo, hi) = (x.min(y), x.max(y));
                        let d = euclid(&points[lo], &points[hi]);
                        let better = match pair_best {
                            None => true,
                            Some((bd, bl, bh)) => d < bd || (d == bd && (lo, hi) < (bl, bh)),
                        };
                        if better {
                            pair_best = Some((d, lo, hi));
                        }
                    }
                }
                let (d, lo, hi) = pair_best.unwrap();
                let better = match best {
                    None => true,
                    Some((bd, bid, ..)) => d < bd || (d == bd && *idb < bid),
                };
                if better {
                    best = Some((d, *idb, jb, lo, hi));
                }
            }
            let (d, idb, jb, lo, hi) = best.unwrap();
            let (mass_a, mass_b) = (ma.len() as u64, clusters[jb].1.len() as u64);
            if mass_a > mass_b {
                continue;
            }
            let key = (*ida.min(&idb), *ida.max(&idb));
            if edges.contains_key(&key) {
                continue; // mutual pair: the lower id was visited first
            }
            let (from_s, to_s) = if ma.contains(&lo) { (lo, hi) } else { (hi, lo) };
            let p = ConnectionProperties::new(mass_a, mass_b, d);
            edges.insert(
                key,
                Connection {
                    id: 0,
                    round,
                    from_cluster: *ida,
                    to_cluster: idb,
                    from_mass: mass_a,
                    to_mass: mass_b,
                    distance: d,
                    mass_product: p.mass_product,
                    distance_sq: p.distance_sq,
                    gamma: p.gamma,
                    redundant: false,
                    pair: [from_s, to_s],
                },
            );
        }
        for (_, mut c) in edges {
            c.id = connections.len();
            let (la, lb) = (label[c.pair[0]], label[c.pair[1]]);
            if la == lb {
                c.redundant = true;
            } else {
                for l in label.iter_mut() {
                    if *l == lb {
                        *l = la;
                    }
                }
            }
            connections.push(c);
        }
        // regroup by label
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (pos, (_, members)) in clusters.iter().enumerate() {
            groups.entry(label[members[0]]).or_default().push(pos);
        }
        let mut kept = Vec::new();
        let mut merged = Vec::new();
        for (_, positions) in groups {
            if positions.len() == 1 {
                kept.push(clusters[positions[0]].clone());
            } else {
                let mut m: Vec<usize> = positions.iter().flat_map(|&p| clusters[p].1.clone()).collect();
                m.sort();
                merged.push(m);
            }
        }
        kept.sort();
        merged.sort_by_key(|m| m[0]);
        let mut next: Vec<(usize, Vec<usize>)> = kept;
        for m in merged {
            next.push((next_id, m));
            next_id += 1;
        }
        clusters = next;
        round += 1;
        rounds.push(clusters.len());
    }
    NaiveRun { connections, rounds }
}

/// Labels after deleting `removed` from the non-redundant edges, numbered by
/// smallest member.
pub fn naive_partition(n: usize, connections: &[Connection], removed: &BTreeSet<usize>) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    for c in connections {
        if c.redundant || removed.contains(&c.id) {
            continue;
        }
        let (la, lb) = (label[c.pair[0]], label[c.pair[1]]);
        for l in label.iter_mut() {
            if *l == lb {
                *l = la;
            }
        }
    }
    let mut remap = BTreeMap::new();
    label
        .iter()
        .map(|l| {
            let next = remap.len();
            *remap.entry(*l).or_insert(next)
        })
        .collect()
}

/// Mean-threshold rule evaluated directly.
pub fn naive_auto_cut(connections: &[Connection]) -> BTreeSet<usize> {
    if connections.is_empty() {
        return BTreeSet::new();
    }
    let mut sum_m = 0.0;
    let mut sum_d = 0.0;
    for c in connections {
        sum_m += c.mass_product as f64;
        sum_d += c.distance_sq;
    }
    let mean_m = sum_m / connections.len() as f64;
    let mean_d = sum_d / connections.len() as f64;
    connections
        .iter()
        .filter(|c| c.mass_product as f64 >= mean_m && c.distance_sq >= mean_d)
        .map(|c| c.id)
        .collect()
}

/// Random planar dataset of `n` points. Odd seeds use a coarse integer grid
/// so duplicates and distance ties appear.
pub fn random_points(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            if seed % 2 == 1 {
                vec![rng.random_range(0..5) as f64, rng.random_range(0..5) as f64]
            } else {
                vec![rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)]
            }
        })
        .collect()
}

pub fn dataset(points: &[Vec<f64>]) -> Dataset {
    Dataset::from_rows(points).unwrap()
}

/// The six late-round connections of the worked example: seven galaxies with
/// masses 15, 2, 10, 3, 2, 2, 16 (one node each), four first-layer links,
/// then two links between the resulting 17, 17 and 16 bodies.
pub struct GalaxyFixture {
    pub result: TorqueResult,
    pub galaxy_mass: Vec<u64>,
}

pub fn galaxy_fixture() -> GalaxyFixture {
    // (round, from, to, from_mass, to_mass, d^2, pair)
    #[allow(clippy::type_complexity)]
    let rows: [(usize, usize, usize, u64, u64, f64, [usize; 2]); 6] = [
        (0, 1, 0, 2, 15, 0.64, [1, 0]),
        (0, 3, 2, 3, 10, 1.00, [3, 2]),
        (0, 4, 2, 2, 10, 0.64, [4, 2]),
        (0, 5, 2, 2, 10, 1.44, [5, 2]),
        (1, 8, 7, 17, 17, 15.83, [2, 0]),
        (1, 9, 7, 16, 17, 14.50, [6, 0]),
    ];
    let connections = rows
        .iter()
        .enumerate()
        .map(|(id, &(round, from, to, fm, tm, d2, pair))| {
            let p = ConnectionProperties::from_squared(fm, tm, d2);
            Connection {
                id,
                round,
                from_cluster: from,
                to_cluster: to,
                from_mass: fm,
                to_mass: tm,
                distance: d2.sqrt(),
                mass_product: p.mass_product,
                distance_sq: p.distance_sq,
                gamma: p.gamma,
                redundant: false,
                pair,
            }
        })
        .collect();
    GalaxyFixture {
        result: TorqueResult {
            n: 7,
            connections,
            rounds: vec![7, 3, 1],
            final_cluster_count: 1,
        },
        galaxy_mass: vec![15, 2, 10, 3, 2, 2, 16],
    }
}

/// Sum of masses per label, sorted descending.
pub fn weighted_sizes(labels: &[usize], weights: &[u64]) -> Vec<u64> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0; k];
    for (l, w) in labels.iter().zip(weights) {
        sizes[*l] += w;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

// ---- metric oracles ----

/// NMI from raw probabilities, geometric normalization.
pub fn oracle_nmi(a: &[i64], b: &[i64]) -> f64 {
    let n = a.len() as f64;
    let la: BTreeSet<i64> = a.iter().copied().collect();
    let lb: BTreeSet<i64> = b.iter().copied().collect();
    let p = |set: &[i64], v: i64| set.iter().filter(|&&x| x == v).count() as f64 / n;
    let ha: f64 = la.iter().map(|&v| -p(a, v) * p(a, v).ln()).sum();
    let hb: f64 = lb.iter().map(|&v| -p(b, v) * p(b, v).ln()).sum();
    let mut mi = 0.0;
    for &x in &la {
        for &y in &lb {
            let pxy = a.iter().zip(b).filter(|(&u, &v)| u == x && v == y).count() as f64 / n;
            if pxy > 0.0 {
                mi += pxy * (pxy / (p(a, x) * p(b, y))).ln();
            }
        }
    }
    if ha == 0.0 && hb == 0.0 {
        1.0
    } else if ha == 0.0 || hb == 0.0 {
        0.0
    } else {
        mi / (ha * hb).sqrt()
    }
}

fn mi_and_entropies(a: &[i64], b: &[i64]) -> (f64, f64, f64) {
    let n = a.len() as f64;
    let la: BTreeSet<i64> = a.iter().copied().collect();
    let lb: BTreeSet<i64> = b.iter().copied().collect();
    let p = |set: &[i64], v: i64| set.iter().filter(|&&x| x == v).count() as f64 / n;
    let ha: f64 = la.iter().map(|&v| -p(a, v) * p(a, v).ln()).sum();
    let hb: f64 = lb.iter().map(|&v| -p(b, v) * p(b, v).ln()).sum();
    let mut mi = 0.0;
    for &x in &la {
        for &y in &lb {
            let pxy = a.iter().zip(b).filter(|(&u, &v)| u == x && v == y).count() as f64 / n;
            if pxy > 0.0 {
                mi += pxy * (pxy / (p(a, x) * p(b, y))).ln();
            }
        }
    }
    (mi, ha, hb)
}

/// Calls `f` once per distinct arrangement of the multiset `items`.
fn for_each_arrangement(items: &mut [i64], f: &mut impl FnMut(&[i64])) {
    items.sort();
    loop {
        f(items);
        // next lexicographic permutation
        let Some(i) = (0..items.len().saturating_sub(1)).rev().find(|&i| items[i] < items[i + 1]) else {
            return;
        };
        let j = (i + 1..items.len()).rev().find(|&j| items[j] > items[i]).unwrap();
        items.swap(i, j);
        items[i + 1..].reverse();
    }
}

/// Expected MI under random relabeling with fixed marginals, by averaging
/// over every distinct arrangement of `b`.
pub fn oracle_emi(a: &[i64], b: &[i64]) -> f64 {
    let mut items = b.to_vec();
    let mut total = 0.0;
    let mut count = 0u64;
    for_each_arrangement(&mut items, &mut |arr| {
        total += mi_and_entropies(a, arr).0;
        count += 1;
    });
    total / count as f64
}

pub fn oracle_ami(a: &[i64], b: &[i64]) -> f64 {
    let (mi, ha, hb) = mi_and_entropies(a, b);
    let emi = oracle_emi(a, b);
    let denom = 0.5 * (ha + hb) - emi;
    if denom.abs() < 1e-15 {
        0.0
    } else {
        (mi - emi) / denom
    }
}

/// Best agreement over every injective relabeling of the smaller side.
pub fn oracle_acc(pred: &[i64], truth: &[i64]) -> f64 {
    let lp: Vec<i64> = pred.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let lt: Vec<i64> = truth.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let size = lp.len().max(lt.len());
    // pad the true labels with sentinels that never match
    let mut targets: Vec<Option<i64>> = lt.iter().map(|&x| Some(x)).collect();
    targets.resize(size, None);
    let mut idx: Vec<usize> = (0..size).collect();
    let mut best = 0usize;
    permute(&mut idx, 0, &mut |perm| {
        let hits = pred
            .iter()
            .zip(truth)
            .filter(|(p, t)| {
                let pi = lp.iter().position(|x| x == *p).unwrap();
                targets[perm[pi]] == Some(**t)
            })
            .count();
        best = best.max(hits);
    });
    best as f64 / pred.len() as f64
}

fn permute(idx: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        f(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, f);
        idx.swap(k, i);
    }
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: i64) -> Vec<i64> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}
