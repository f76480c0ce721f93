use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

/// Error body sent to clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session '{id}'"))
    }
}

impl From<torque::Error> for ApiError {
    fn from(e: torque::Error) -> Self {
        use torque::Error as E;
        let (status, code) = match &e {
            E::Input(_) | E::Matrix(_) | E::Parse { .. } | E::Json(_) => (StatusCode::BAD_REQUEST, "invalid_input"),
            E::UnknownConnection(_) => (StatusCode::BAD_REQUEST, "unknown_connection"),
            E::Unsupported(_) => (StatusCode::CONFLICT, "unsupported"),
            E::State(_) => (StatusCode::CONFLICT, "invalid_state"),
            E::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code,
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}
