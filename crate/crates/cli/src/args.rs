use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use torque::metrics::Score;
use torque::{InputKind, Linkage, Metric};

#[derive(Debug, Parser)]
#[command(name = "tc", version, about = "Torque clustering: fit, evaluate and explore")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a CSV file and write the requested artifacts.
    Fit(FitArgs),
    /// Score a predicted label file against a reference.
    Eval(EvalArgs),
    /// Start the local HTTP API, optionally with a dataset preloaded.
    Serve(ServeArgs),
}

/// Where the samples come from and how they are compared.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV of feature rows or a square distance matrix.
    #[arg(long)]
    pub input: PathBuf,
    /// points | matrix. Defaults to matrix for `--metric precomputed`.
    #[arg(long, value_parser = parse_with::<InputKind>)]
    pub input_kind: Option<InputKind>,
    /// euclidean | cosine | precomputed
    #[arg(long, value_parser = parse_with::<Metric>)]
    pub metric: Option<Metric>,
    /// single | complete | average | centroid
    #[arg(long, value_parser = parse_with::<Linkage>)]
    pub linkage: Option<Linkage>,
    /// Use the k-d tree mean-representative mode.
    #[arg(long)]
    pub approx: bool,
    /// 0-based column holding ground-truth labels (points input only).
    #[arg(long)]
    pub label_col: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// auto | topk:K | manual:FILE
    #[arg(long, default_value = "auto")]
    pub cut: String,
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    #[arg(long)]
    pub decision_graph_out: Option<PathBuf>,
    #[arg(long)]
    pub hierarchy_out: Option<PathBuf>,
    #[arg(long)]
    pub gamma_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// nmi | acc | ami
    #[arg(long, value_parser = parse_with::<Score>)]
    pub metric: Score,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Dataset to load into a session at startup.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_parser = parse_with::<InputKind>)]
    pub input_kind: Option<InputKind>,
    #[arg(long, value_parser = parse_with::<Metric>)]
    pub metric: Option<Metric>,
    #[arg(long, value_parser = parse_with::<Linkage>)]
    pub linkage: Option<Linkage>,
    #[arg(long)]
    pub approx: bool,
    #[arg(long)]
    pub label_col: Option<usize>,
}

impl ServeArgs {
    pub fn input(&self) -> Option<InputArgs> {
        self.dataset.clone().map(|input| InputArgs {
            input,
            input_kind: self.input_kind,
            metric: self.metric,
            linkage: self.linkage,
            approx: self.approx,
            label_col: self.label_col,
        })
    }
}

fn parse_with<T: std::str::FromStr<Err = torque::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: torque::Error| e.to_string())
}
