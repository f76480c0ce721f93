//! The `tc` command line: `fit`, `eval` and `serve`.
//!
//! Artifacts are written to a sibling temporary file and renamed into place,
//! so a path either holds a complete file or is left untouched.

pub mod args;

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use torque::cut::{cut, gamma_ranking, CutSpec};
use torque::io::{self, load_input};
use torque::metrics::{acc, ami, nmi};
use torque::{Input, Linkage, Partition, RunOptions, TorqueResult};

pub use args::{Cli, Command, EvalArgs, FitArgs, InputArgs, ServeArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] torque::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Service(#[from] tc_service::ApiError),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

fn file_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::File {
        path: path.to_path_buf(),
        source,
    }
}

/// Resolves `--linkage` and `--approx` into run options.
pub fn run_options(linkage: Option<Linkage>, approx: bool) -> Result<RunOptions> {
    let linkage = match (approx, linkage) {
        (false, l) => l.unwrap_or_default(),
        (true, None | Some(Linkage::MeanRepresentative)) => Linkage::MeanRepresentative,
        (true, Some(l)) => return Err(CliError::Usage(format!("--approx cannot be combined with --linkage {l}"))),
    };
    Ok(RunOptions::from(linkage))
}

/// Reads the input file and validates the linkage choice against it.
pub fn load(args: &InputArgs) -> Result<(Input, Option<Vec<i64>>, RunOptions)> {
    let options = run_options(args.linkage, args.approx)?;
    let (input, labels) = load_input(&args.input, args.input_kind, args.metric, args.label_col).map_err(|e| match e {
        torque::Error::Io(source) => CliError::File {
            path: args.input.clone(),
            source,
        },
        other => other.into(),
    })?;
    input.check_linkage(options.linkage)?;
    Ok((input, labels, options))
}

/// Parses a `--cut` value; `manual:FILE` reads whitespace- or
/// comma-separated connection ids from FILE.
pub fn parse_cut(spec: &str) -> Result<CutSpec> {
    let Some(path) = spec.strip_prefix("manual:") else {
        return Ok(spec.parse()?);
    };
    let path = Path::new(path);
    let text = fs::read_to_string(path).map_err(file_error(path))?;
    let ids = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{}: '{t}' is not a connection id", path.display())))
        })
        .collect::<Result<BTreeSet<usize>>>()?;
    Ok(CutSpec::Manual { ids })
}

/// Writes through a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> torque::Result<()>) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let written = (|| -> Result<()> {
        let mut w = BufWriter::new(File::create(&tmp).map_err(file_error(&tmp))?);
        body(&mut w)?;
        let file = w.into_inner().map_err(|e| CliError::File {
            path: tmp.clone(),
            source: e.into_error(),
        })?;
        file.sync_all().map_err(file_error(&tmp))?;
        fs::rename(&tmp, path).map_err(file_error(path))
    })();
    if written.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    written
}

/// What `fit` computed, for printing and for tests.
#[derive(Debug, Clone)]
pub struct FitSummary {
    pub result: TorqueResult,
    pub removed: BTreeSet<usize>,
    pub partition: Partition,
    pub warnings: Vec<String>,
    /// NMI, ACC and AMI against the label column, when one was read.
    pub scores: Option<[f64; 3]>,
}

impl FitSummary {
    pub fn report(&self) -> String {
        let mut s = format!("K={}\nrounds={}\n", self.partition.k, self.result.round_count());
        if let Some([n, a, m]) = self.scores {
            s.push_str(&format!("nmi={n:.4}\nacc={a:.4}\nami={m:.4}\n"));
        }
        s
    }
}

pub fn fit(args: &FitArgs) -> Result<FitSummary> {
    let spec = parse_cut(&args.cut)?;
    let (input, truth, options) = load(&args.input)?;
    let result = torque::run(&input, options)?;
    let outcome = cut(&result, &spec)?;

    if let Some(path) = &args.labels_out {
        write_atomic(path, |w| io::write_labels(w, &outcome.partition.labels))?;
    }
    if let Some(path) = &args.decision_graph_out {
        write_atomic(path, |w| io::write_decision_graph(w, &result))?;
    }
    if let Some(path) = &args.hierarchy_out {
        write_atomic(path, |w| io::write_hierarchy(w, &result.rounds))?;
    }
    if let Some(path) = &args.gamma_out {
        let ranking = gamma_ranking(&result.connections);
        write_atomic(path, |w| io::write_gamma_ranking(w, &ranking))?;
    }
    let scores = match truth {
        Some(t) => {
            let p = &outcome.partition.labels;
            Some([nmi(p, &t)?, acc(p, &t)?, ami(p, &t)?])
        }
        None => None,
    };
    Ok(FitSummary {
        result,
        removed: outcome.removed,
        partition: outcome.partition,
        warnings: outcome.warnings,
        scores,
    })
}

pub fn eval(args: &EvalArgs) -> Result<f64> {
    let read = |p: &Path| {
        io::read_labels(p).map_err(|e| match e {
            torque::Error::Io(source) => CliError::File {
                path: p.to_path_buf(),
                source,
            },
            other => other.into(),
        })
    };
    let pred = read(&args.pred)?;
    let truth = read(&args.truth)?;
    if pred.len() != truth.len() {
        return Err(CliError::Usage(format!(
            "label files differ in length: {} has {}, {} has {}",
            args.pred.display(),
            pred.len(),
            args.truth.display(),
            truth.len()
        )));
    }
    Ok(args.metric.evaluate(&pred, &truth)?)
}

pub fn serve(args: &ServeArgs) -> Result<()> {
    let store = Arc::new(tc_service::SessionStore::default());
    if let Some(input_args) = args.input() {
        let (input, _, options) = load(&input_args)?;
        let session = store.create(&input, options)?;
        let k = session.partition(&store.config)?.k;
        println!("session {} (n={}, K={k})", session.id, session.n());
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Usage(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let addr = tc_service::loopback(args.port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::Usage(format!("cannot bind {addr}: {e}")))?;
        println!("listening on http://{addr}/v1/");
        tc_service::serve(listener, store)
            .await
            .map_err(|e| CliError::Usage(format!("server error: {e}")))
    })
}
