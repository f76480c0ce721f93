//! HTTP routes under `/v1`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use torque::io::{parse_input, ConnectionRecord};
use torque::projection::project_2d;
use torque::{Linkage, RunOptions};

use crate::error::ApiError;
use crate::session::{CutRequest, PartitionSummary, SessionStore};

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Query parameters of `POST /v1/sessions`. The body is the CSV file.
#[derive(Debug, Default, Deserialize)]
pub struct CreateParams {
    pub kind: Option<String>,
    pub metric: Option<String>,
    pub linkage: Option<String>,
    #[serde(default)]
    pub approx: bool,
    pub label_col: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub n: usize,
    pub d: Option<usize>,
    pub projectable: bool,
    pub linkage: Linkage,
    pub rounds: Vec<usize>,
    pub connection_count: usize,
    pub partition: PartitionSummary,
}

#[derive(Debug, Serialize)]
pub struct GraphResponse {
    pub session_id: String,
    pub version: u64,
    pub n: usize,
    pub rounds: Vec<usize>,
    pub removed: Vec<usize>,
    pub connections: Vec<ConnectionRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProjectionResponse {
    pub session_id: String,
    pub n: usize,
    pub d: usize,
    pub coordinates: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionList {
    pub sessions: Vec<String>,
}

pub fn router(store: Arc<SessionStore>) -> Router {
    let limit = store.config.max_body_bytes;
    Router::new()
        .route("/v1/sessions", post(create_session).get(list_sessions))
        .route("/v1/sessions/{id}/graph", get(graph))
        .route("/v1/sessions/{id}/cut", post(cut))
        .route("/v1/sessions/{id}/partition", get(partition))
        .route("/v1/sessions/{id}/projection", get(projection))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .layer(DefaultBodyLimit::max(limit))
        .with_state(store)
}

fn parse_opt<T>(value: Option<&str>) -> Result<Option<T>, ApiError>
where
    T: std::str::FromStr<Err = torque::Error>,
{
    value.map(str::parse).transpose().map_err(ApiError::from)
}

fn run_options(params: &CreateParams) -> Result<RunOptions, ApiError> {
    let linkage: Option<Linkage> = parse_opt(params.linkage.as_deref())?;
    let linkage = match (params.approx, linkage) {
        (false, l) => l.unwrap_or_default(),
        (true, None | Some(Linkage::MeanRepresentative)) => Linkage::MeanRepresentative,
        (true, Some(l)) => {
            return Err(ApiError::bad_request(format!("approx mode cannot be combined with {l} linkage")))
        }
    };
    Ok(RunOptions::from(linkage))
}

async fn create_session(
    State(store): State<Arc<SessionStore>>,
    params: Result<Query<CreateParams>, QueryRejection>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let Query(params) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8 text"))?;
    let options = run_options(&params)?;
    let (input, _) = parse_input(
        text,
        parse_opt(params.kind.as_deref())?,
        parse_opt(params.metric.as_deref())?,
        params.label_col,
    )?;
    let session = {
        let store = store.clone();
        tokio::task::spawn_blocking(move || store.create(&input, options))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??
    };
    let partition = session.partition(&store.config)?;
    let created = SessionCreated {
        session_id: session.id.clone(),
        n: session.n(),
        d: session.dim(),
        projectable: session.dataset.is_some(),
        linkage: session.linkage,
        rounds: session.result.rounds.clone(),
        connection_count: session.result.connections.len(),
        partition,
    };
    Ok((StatusCode::CREATED, Json(created)))
}

async fn list_sessions(State(store): State<Arc<SessionStore>>) -> Json<SessionList> {
    Json(SessionList { sessions: store.ids() })
}

async fn graph(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<GraphResponse> {
    let session = store.get(&id)?;
    let (version, removed) = session.removed();
    Ok(Json(GraphResponse {
        session_id: session.id.clone(),
        version,
        n: session.n(),
        rounds: session.result.rounds.clone(),
        removed,
        connections: session.result.connections.iter().map(ConnectionRecord::from).collect(),
    }))
}

async fn cut(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    body: Result<Json<CutRequest>, JsonRejection>,
) -> ApiResult<PartitionSummary> {
    let session = store.get(&id)?;
    let Json(request) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    session.cut(&request, &store.config).map(Json)
}

async fn partition(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<PartitionSummary> {
    let session = store.get(&id)?;
    session.partition(&store.config).map(Json)
}

async fn projection(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<ProjectionResponse> {
    let session = store.get(&id)?;
    let data = session.dataset.as_ref().ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "unsupported",
            "session was built from a distance matrix and has no features to project",
        )
    })?;
    Ok(Json(ProjectionResponse {
        session_id: session.id.clone(),
        n: data.n(),
        d: data.dim(),
        coordinates: project_2d(data),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(linkage: Option<&str>, approx: bool) -> CreateParams {
        CreateParams {
            linkage: linkage.map(String::from),
            approx,
            ..CreateParams::default()
        }
    }

    #[test]
    fn linkage_and_approx() {
        assert_eq!(run_options(&params(None, false)).unwrap().linkage, Linkage::Single);
        assert_eq!(run_options(&params(Some("average"), false)).unwrap().linkage, Linkage::Average);
        assert_eq!(run_options(&params(None, true)).unwrap().linkage, Linkage::MeanRepresentative);
        assert!(run_options(&params(Some("single"), true)).is_err());
        assert_eq!(run_options(&params(Some("nope"), false)).unwrap_err().code, "invalid_input");
    }
}
