//! Sessions: one immutable clustering run plus the mutable set of removed
//! connections.

use std::collections::hash_map::RandomState;
use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::hash::BuildHasher;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use torque::cut::{auto_cut, manual_cut, topk_cut};
use torque::{apply_cut, io, Dataset, Input, Linkage, Partition, RunOptions, TorqueResult};

use crate::error::ApiError;

/// Largest `n` whose labels are returned inline.
pub const INLINE_LABEL_LIMIT: usize = 100_000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub inline_label_limit: usize,
    /// Where oversized label vectors are written.
    pub output_dir: PathBuf,
    pub max_body_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            inline_label_limit: INLINE_LABEL_LIMIT,
            output_dir: std::env::temp_dir(),
            max_body_bytes: 512 * 1024 * 1024,
        }
    }
}

/// Cut request body, tagged by `mode`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CutRequest {
    Auto,
    Topk { k: usize },
    Toggle { id: usize },
    Set { ids: Vec<usize> },
}

#[derive(Debug, Clone)]
struct CutState {
    version: u64,
    removed: BTreeSet<usize>,
    partition: Partition,
    warnings: Vec<String>,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub result: TorqueResult,
    pub linkage: Linkage,
    /// Raw features; absent for distance-matrix sessions.
    pub dataset: Option<Dataset>,
    state: Mutex<CutState>,
}

/// Partition as reported to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub session_id: String,
    pub version: u64,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub removed: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_path: Option<String>,
    pub warnings: Vec<String>,
}

impl Session {
    fn new(id: String, result: TorqueResult, dataset: Option<Dataset>, linkage: Linkage) -> Result<Self, ApiError> {
        if let Some(d) = dataset.as_ref().filter(|d| d.n() != result.n) {
            return Err(ApiError::bad_request(format!(
                "dataset has {} rows but the run covers {} samples",
                d.n(),
                result.n
            )));
        }
        let removed = auto_cut(&result.connections);
        let partition = apply_cut(&result, &removed)?;
        Ok(Self {
            id,
            linkage,
            dataset,
            result,
            state: Mutex::new(CutState {
                version: 0,
                removed,
                partition,
                warnings: Vec::new(),
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.result.n
    }

    pub fn dim(&self) -> Option<usize> {
        self.dataset.as_ref().map(Dataset::dim)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, CutState> {
        // a panic while holding the lock leaves a consistent state behind
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Current version and removed set.
    pub fn removed(&self) -> (u64, Vec<usize>) {
        let s = self.lock();
        (s.version, s.removed.iter().copied().collect())
    }

    /// Applies a cut. Mutations of one session are serialized; the version
    /// goes up by one with each accepted request.
    pub fn cut(&self, request: &CutRequest, config: &ServiceConfig) -> Result<PartitionSummary, ApiError> {
        let mut s = self.lock();
        let (removed, warnings) = match request {
            CutRequest::Auto => (auto_cut(&self.result.connections), Vec::new()),
            CutRequest::Topk { k } => (topk_cut(&self.result, *k)?, Vec::new()),
            CutRequest::Toggle { id } => {
                let c = self.result.connection(*id).ok_or(torque::Error::UnknownConnection(*id))?;
                let mut removed = s.removed.clone();
                if !removed.remove(id) {
                    removed.insert(*id);
                }
                let warnings = if c.redundant {
                    vec![format!("connection {id} is redundant; toggling it does not change the partition")]
                } else {
                    Vec::new()
                };
                (removed, warnings)
            }
            CutRequest::Set { ids } => {
                let ids: BTreeSet<usize> = ids.iter().copied().collect();
                let m = manual_cut(&self.result.connections, &ids)?;
                let warnings = m.warnings();
                (m.removed, warnings)
            }
        };
        let partition = apply_cut(&self.result, &removed)?;
        s.version += 1;
        s.removed = removed;
        s.partition = partition;
        s.warnings = warnings;
        self.summary(&s, config)
    }

    pub fn partition(&self, config: &ServiceConfig) -> Result<PartitionSummary, ApiError> {
        let s = self.lock();
        self.summary(&s, config)
    }

    fn summary(&self, s: &CutState, config: &ServiceConfig) -> Result<PartitionSummary, ApiError> {
        let (labels, labels_path) = if self.n() <= config.inline_label_limit {
            (Some(s.partition.labels.clone()), None)
        } else {
            let path = config.output_dir.join(format!("{}-v{}.labels", self.id, s.version));
            if !path.exists() {
                let file = File::create(&path).map_err(torque::Error::from)?;
                io::write_labels(BufWriter::new(file), &s.partition.labels)?;
            }
            (None, Some(path.display().to_string()))
        };
        Ok(PartitionSummary {
            session_id: self.id.clone(),
            version: s.version,
            k: s.partition.k,
            sizes: s.partition.sizes(),
            removed: s.removed.iter().copied().collect(),
            labels,
            labels_path,
            warnings: s.warnings.clone(),
        })
    }
}

/// All live sessions.
#[derive(Debug)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    counter: AtomicU64,
    salt: RandomState,
    pub config: ServiceConfig,
}

impl SessionStore {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            counter: AtomicU64::new(0),
            salt: RandomState::new(),
            config,
        }
    }

    fn next_id(&self) -> String {
        let k = self.counter.fetch_add(1, Ordering::Relaxed);
        format!("{:016x}{k:x}", self.salt.hash_one(k))
    }

    /// Runs the engine once and registers the result.
    pub fn create(&self, input: &Input, options: RunOptions) -> Result<Arc<Session>, ApiError> {
        let result = torque::run(input, options)?;
        self.insert(result, input.dataset().cloned(), options.linkage)
    }

    /// Registers an existing run, e.g. one read back from a decision-graph
    /// file. `dataset`, when given, must have one row per sample.
    pub fn insert(
        &self,
        result: TorqueResult,
        dataset: Option<Dataset>,
        linkage: Linkage,
    ) -> Result<Arc<Session>, ApiError> {
        let session = Arc::new(Session::new(self.next_id(), result, dataset, linkage)?);
        self.sessions
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(session.id.clone(), session.clone());
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::unknown_session(id))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new(ServiceConfig::default())
    }
}
