//! Parameter-free hierarchical clustering driven by mass and distance.
//!
//! Every sample starts as its own cluster of mass one. In each round a
//! cluster links to its nearest neighbouring cluster when its mass does not
//! exceed the neighbour's, and linked clusters merge. Each link is recorded
//! as a [`Connection`] carrying the product of the two masses, the squared
//! distance between the clusters and their product, the torque. Once
//! everything has merged, the connections that are heavy and long at the
//! same time are cut to obtain the final partition.
//!
//! ```
//! use torque::{cut, engine, linkage::{Input, Linkage, Metric}, synth};
//!
//! let (data, _) = synth::three_groups(7);
//! let input = Input::points(data, Metric::Euclidean).unwrap();
//! let result = engine::run(&input, Linkage::Single).unwrap();
//! let outcome = cut::cut(&result, &cut::CutSpec::TopK { k: 3 }).unwrap();
//! assert_eq!(outcome.partition.k, 3);
//! ```

pub mod cut;
pub mod dsu;
pub mod engine;
pub mod error;
pub mod io;
pub mod kdtree;
pub mod linkage;
pub mod metrics;
pub mod model;
mod par;
pub mod projection;
pub mod synth;

pub use cut::{apply_cut, auto_cut, gamma_ranking, manual_cut, topk_cut, CutOutcome, CutSpec};
pub use engine::{run, RunOptions};
pub use error::{Error, MatrixViolation, Result};
pub use io::InputKind;
pub use linkage::{Input, Linkage, Metric};
pub use model::{
    connection_properties, partition_from_components, validate_distance_matrix, Cluster, Connection,
    ConnectionProperties, Dataset, DistanceMatrix, Partition, TorqueResult,
};
