//! File formats: CSV inputs, label files, the decision-graph document, the
//! hierarchy listing and the torque ranking.
//!
//! The decision graph is a JSON document. Real-valued fields are written
//! with 17 significant digits so a reader recovers the exact `f64`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::cut::RankedConnection;
use crate::error::{Error, Result};
use crate::linkage::{Input, Metric};
use crate::model::{Connection, Dataset, DistanceMatrix, TorqueResult};

pub const DECISION_GRAPH_FORMAT: &str = "torque-decision-graph";
pub const DECISION_GRAPH_VERSION: u32 = 1;

/// Scientific notation with 17 significant digits.
pub fn format_exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// `f64` that serializes through [`format_exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exact(pub f64);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite value"));
        }
        let raw = RawValue::from_string(format_exact(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Exact)
    }
}

/// One connection as it appears in files and on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionRecord {
    pub id: usize,
    pub round: usize,
    pub from_cluster: usize,
    pub to_cluster: usize,
    pub from_mass: u64,
    pub to_mass: u64,
    pub distance: Exact,
    pub mass_product: u64,
    pub distance_sq: Exact,
    pub gamma: Exact,
    pub redundant: bool,
    pub pair: [usize; 2],
}

impl From<&Connection> for ConnectionRecord {
    fn from(c: &Connection) -> Self {
        ConnectionRecord {
            id: c.id,
            round: c.round,
            from_cluster: c.from_cluster,
            to_cluster: c.to_cluster,
            from_mass: c.from_mass,
            to_mass: c.to_mass,
            distance: Exact(c.distance),
            mass_product: c.mass_product,
            distance_sq: Exact(c.distance_sq),
            gamma: Exact(c.gamma),
            redundant: c.redundant,
            pair: c.pair,
        }
    }
}

impl From<ConnectionRecord> for Connection {
    fn from(r: ConnectionRecord) -> Self {
        Connection {
            id: r.id,
            round: r.round,
            from_cluster: r.from_cluster,
            to_cluster: r.to_cluster,
            from_mass: r.from_mass,
            to_mass: r.to_mass,
            distance: r.distance.0,
            mass_product: r.mass_product,
            distance_sq: r.distance_sq.0,
            gamma: r.gamma.0,
            redundant: r.redundant,
            pair: r.pair,
        }
    }
}

/// The decision-graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionGraph {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub rounds: Vec<usize>,
    pub connections: Vec<ConnectionRecord>,
}

impl From<&TorqueResult> for DecisionGraph {
    fn from(r: &TorqueResult) -> Self {
        DecisionGraph {
            format: DECISION_GRAPH_FORMAT.to_string(),
            version: DECISION_GRAPH_VERSION,
            n: r.n,
            rounds: r.rounds.clone(),
            connections: r.connections.iter().map(ConnectionRecord::from).collect(),
        }
    }
}

impl DecisionGraph {
    pub fn into_result(self) -> Result<TorqueResult> {
        if self.format != DECISION_GRAPH_FORMAT {
            return Err(Error::input(format!("unexpected format tag '{}'", self.format)));
        }
        if self.version != DECISION_GRAPH_VERSION {
            return Err(Error::input(format!("unsupported version {}", self.version)));
        }
        let final_cluster_count = self.rounds.last().copied().unwrap_or(self.n);
        Ok(TorqueResult {
            n: self.n,
            connections: self.connections.into_iter().map(Connection::from).collect(),
            rounds: self.rounds,
            final_cluster_count,
        })
    }
}

pub fn write_decision_graph<W: Write>(mut w: W, result: &TorqueResult) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &DecisionGraph::from(result))?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_decision_graph(text: &str) -> Result<TorqueResult> {
    serde_json::from_str::<DecisionGraph>(text)?.into_result()
}

/// One cluster count per line, first line `n`, last line `1`.
pub fn write_hierarchy<W: Write>(mut w: W, rounds: &[usize]) -> Result<()> {
    for count in rounds {
        writeln!(w, "{count}")?;
    }
    Ok(())
}

/// CSV with header `rank,id,gamma,redundant`.
pub fn write_gamma_ranking<W: Write>(mut w: W, ranking: &[RankedConnection]) -> Result<()> {
    writeln!(w, "rank,id,gamma,redundant")?;
    for r in ranking {
        writeln!(w, "{},{},{},{}", r.rank, r.id, format_exact(r.gamma), r.redundant)?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(mut w: W, labels: &[usize]) -> Result<()> {
    for l in labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

pub fn parse_labels(text: &str) -> Result<Vec<i64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_label(l.trim(), i + 1))
        .collect()
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    parse_labels(&fs::read_to_string(path)?)
}

fn parse_label(field: &str, line: usize) -> Result<i64> {
    if let Ok(v) = field.parse::<i64>() {
        return Ok(v);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 => Ok(v as i64),
        _ => Err(Error::Parse {
            line,
            message: format!("'{field}' is not an integer label"),
        }),
    }
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    match field.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::Parse {
            line,
            message: format!("non-finite value '{}'", field.trim()),
        }),
        Err(_) => Err(Error::Parse {
            line,
            message: format!("'{}' is not a number", field.trim()),
        }),
    }
}

/// Non-empty lines with their 1-based line numbers; the first one is dropped
/// when any of its fields is not numeric.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let header = lines
        .peek()
        .is_some_and(|(_, l)| l.split(',').any(|f| f.trim().parse::<f64>().is_err()));
    if header {
        lines.next();
    }
    lines
}

/// Parses comma-separated feature rows. With `label_col`, that 0-based column
/// is read as an integer label and excluded from the features.
pub fn parse_points_csv(text: &str, label_col: Option<usize>) -> Result<(Dataset, Option<Vec<i64>>)> {
    let mut values = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    let mut width: Option<usize> = None;
    let mut n = 0;
    for (line, l) in data_lines(text) {
        let fields: Vec<&str> = l.split(',').collect();
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} fields, found {}", fields.len()),
                })
            }
            _ => {}
        }
        if let Some(col) = label_col {
            if col >= fields.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("label column {col} out of range for {} fields", fields.len()),
                });
            }
        }
        for (j, f) in fields.iter().enumerate() {
            if Some(j) == label_col {
                labels
                    .as_mut()
                    .expect("label column requested")
                    .push(parse_label(f.trim(), line)?);
            } else {
                values.push(parse_value(f, line)?);
            }
        }
        n += 1;
    }
    let d = width.unwrap_or(0) - usize::from(label_col.is_some() && width.is_some());
    if n > 0 && d == 0 {
        return Err(Error::input("rows contain no feature columns"));
    }
    Ok((Dataset::from_flat(values, n, d)?, labels))
}

pub fn load_points_csv(path: impl AsRef<Path>, label_col: Option<usize>) -> Result<(Dataset, Option<Vec<i64>>)> {
    parse_points_csv(&fs::read_to_string(path)?, label_col)
}

/// Parses a square CSV matrix and validates it as a distance matrix.
pub fn parse_distance_csv(text: &str) -> Result<DistanceMatrix> {
    let mut rows = Vec::new();
    for (line, l) in data_lines(text) {
        let row = l
            .split(',')
            .map(|f| parse_value(f, line))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DistanceMatrix::from_rows(&rows)
}

pub fn load_distance_csv(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    parse_distance_csv(&fs::read_to_string(path)?)
}

/// What a CSV input holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    #[default]
    Points,
    Matrix,
}

impl std::str::FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "points" => Ok(Self::Points),
            "matrix" | "distance" | "distances" => Ok(Self::Matrix),
            other => Err(Error::input(format!("unknown input kind '{other}' (points | matrix)"))),
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Points => "points",
            Self::Matrix => "matrix",
        })
    }
}

/// Builds a clustering input from CSV text. `kind` defaults to a matrix when
/// the metric is `precomputed` and to points otherwise; a matrix only pairs
/// with the precomputed metric. Labels come back only for point files read
/// with `label_col`.
pub fn parse_input(
    text: &str,
    kind: Option<InputKind>,
    metric: Option<Metric>,
    label_col: Option<usize>,
) -> Result<(Input, Option<Vec<i64>>)> {
    let kind = kind.unwrap_or(if metric == Some(Metric::Precomputed) {
        InputKind::Matrix
    } else {
        InputKind::Points
    });
    match kind {
        InputKind::Points => {
            let (data, labels) = parse_points_csv(text, label_col)?;
            Ok((Input::points(data, metric.unwrap_or_default())?, labels))
        }
        InputKind::Matrix => {
            if let Some(m) = metric.filter(|&m| m != Metric::Precomputed) {
                return Err(Error::input(format!(
                    "a distance matrix already holds distances; metric '{m}' does not apply"
                )));
            }
            if label_col.is_some() {
                return Err(Error::input("label columns are only read from point files"));
            }
            Ok((Input::Matrix(parse_distance_csv(text)?), None))
        }
    }
}

pub fn load_input(
    path: impl AsRef<Path>,
    kind: Option<InputKind>,
    metric: Option<Metric>,
    label_col: Option<usize>,
) -> Result<(Input, Option<Vec<i64>>)> {
    parse_input(&fs::read_to_string(path)?, kind, metric, label_col)
}
