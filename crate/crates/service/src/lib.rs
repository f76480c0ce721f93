//! Local HTTP+JSON API over torque clustering runs.
//!
//! A session holds one finished run and the set of connections currently
//! removed from it. Clients read the decision graph, post cuts and get the
//! resulting partition back; the run itself is never recomputed.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/v1/sessions` | CSV body; query `kind`, `metric`, `linkage`, `approx`, `label_col` |
//! | GET | `/v1/sessions` | session ids |
//! | GET | `/v1/sessions/{id}/graph` | connection log, rounds, removed set |
//! | POST | `/v1/sessions/{id}/cut` | `{"mode":"auto"}`, `{"mode":"topk","k":3}`, `{"mode":"toggle","id":7}`, `{"mode":"set","ids":[..]}` |
//! | GET | `/v1/sessions/{id}/partition` | current partition |
//! | GET | `/v1/sessions/{id}/projection` | planar coordinates, 409 for matrix sessions |
//!
//! Errors are `{"code": .., "message": ..}`.

pub mod api;
pub mod error;
pub mod session;

use std::net::{Ipv4Addr, SocketAddr};
use std::sync::Arc;

pub use api::router;
pub use error::{ApiError, ErrorBody};
pub use session::{CutRequest, PartitionSummary, ServiceConfig, Session, SessionStore, INLINE_LABEL_LIMIT};

/// Loopback address on `port`; the service is meant for a single local user.
pub fn loopback(port: u16) -> SocketAddr {
    SocketAddr::from((Ipv4Addr::LOCALHOST, port))
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, store: Arc<SessionStore>) -> std::io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
