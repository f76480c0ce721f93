//! External agreement indices between two labelings: NMI, ACC and AMI.
//!
//! Entropies use natural logarithms with `0 ln 0 = 0`.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Co-occurrence counts of two labelings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    pub fn new<A, B>(a: &[A], b: &[B]) -> Result<Self>
    where
        A: Copy + Eq + Hash,
        B: Copy + Eq + Hash,
    {
        if a.len() != b.len() {
            return Err(Error::input(format!(
                "label vectors differ in length: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::input("label vectors are empty"));
        }
        let ra = dense_codes(a);
        let rb = dense_codes(b);
        let rows = ra.iter().max().map_or(0, |m| m + 1);
        let cols = rb.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![vec![0u64; cols]; rows];
        for (&i, &j) in ra.iter().zip(&rb) {
            counts[i][j] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            n: a.len() as u64,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        let mut mi = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                mi += c / n * (n * c / (self.row_sums[i] as f64 * self.col_sums[j] as f64)).ln();
            }
        }
        mi.max(0.0)
    }

    pub fn row_entropy(&self) -> f64 {
        entropy(&self.row_sums, self.n)
    }

    pub fn col_entropy(&self) -> f64 {
        entropy(&self.col_sums, self.n)
    }
}

/// Maps arbitrary labels to `0..k` in order of first appearance.
fn dense_codes<T: Copy + Eq + Hash>(labels: &[T]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn entropy(sums: &[u64], n: u64) -> f64 {
    let n = n as f64;
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information with geometric-mean normalization.
///
/// Two single-cluster labelings score 1; exactly one single-cluster
/// labeling scores 0.
pub fn nmi<A, B>(a: &[A], b: &[B]) -> Result<f64>
where
    A: Copy + Eq + Hash,
    B: Copy + Eq + Hash,
{
    let t = ContingencyTable::new(a, b)?;
    let (ha, hb) = (t.row_entropy(), t.col_entropy());
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    Ok((t.mutual_information() / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

/// Clustering accuracy: the largest fraction of samples that agree under a
/// one-to-one matching of predicted to true labels.
pub fn acc<A, B>(pred: &[A], truth: &[B]) -> Result<f64>
where
    A: Copy + Eq + Hash,
    B: Copy + Eq + Hash,
{
    let t = ContingencyTable::new(pred, truth)?;
    let size = t.counts.len().max(t.col_sums.len());
    let max = t.counts.iter().flatten().copied().max().unwrap_or(0) as i64;
    // minimise (max - count) on the zero-padded square table
    let cost: Vec<Vec<i64>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let c = t.counts.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0);
                    max - c as i64
                })
                .collect()
        })
        .collect();
    let assignment = hungarian(&cost);
    let matched: u64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| t.counts.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0))
        .sum();
    Ok(matched as f64 / t.n as f64)
}

/// Minimum-cost perfect matching on a square cost matrix. Returns, for each
/// row, the assigned column.
pub fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // potentials and matching are 1-based; index 0 is the virtual column
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    col_of_row
}

/// `ln(k!)` for `k = 0..=n`.
fn ln_factorials(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Expected mutual information between two random labelings with the
/// table's marginals, summed exactly over the hypergeometric support.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.n;
    let nf = n as f64;
    let lf = ln_factorials(n);
    let mut emi = 0.0;
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed = lf[a as usize] + lf[b as usize] + lf[(n - a) as usize] + lf[(n - b) as usize]
                - lf[n as usize];
            for nij in lo..=hi {
                let ln_p = fixed
                    - lf[nij as usize]
                    - lf[(a - nij) as usize]
                    - lf[(b - nij) as usize]
                    - lf[(n + nij - a - b) as usize];
                let x = nij as f64;
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * ln_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information, arithmetic-mean normalization. Returns 0
/// when the adjusted denominator vanishes.
pub fn ami<A, B>(a: &[A], b: &[B]) -> Result<f64>
where
    A: Copy + Eq + Hash,
    B: Copy + Eq + Hash,
{
    let t = ContingencyTable::new(a, b)?;
    let mi = t.mutual_information();
    let emi = expected_mutual_information(&t);
    let mean_h = 0.5 * (t.row_entropy() + t.col_entropy());
    let denom = mean_h - emi;
    if denom.abs() < 1e-15 {
        return Ok(0.0);
    }
    Ok((mi - emi) / denom)
}

/// The three supported indices, for front ends that pick one by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Score {
    Nmi,
    Acc,
    Ami,
}

impl std::str::FromStr for Score {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nmi" => Ok(Score::Nmi),
            "acc" => Ok(Score::Acc),
            "ami" => Ok(Score::Ami),
            other => Err(Error::input(format!("unknown score '{other}'"))),
        }
    }
}

impl Score {
    pub fn evaluate<A, B>(self, pred: &[A], truth: &[B]) -> Result<f64>
    where
        A: Copy + Eq + Hash,
        B: Copy + Eq + Hash,
    {
        match self {
            Score::Nmi => nmi(pred, truth),
            Score::Acc => acc(pred, truth),
            Score::Ami => ami(pred, truth),
        }
    }
}
