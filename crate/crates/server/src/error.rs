use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use dialogue_core::brain::BrainError;

use crate::wire::ErrorBody;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "Mismatch", message)
    }
}

impl From<BrainError> for ApiError {
    fn from(e: BrainError) -> Self {
        use StatusCode as S;
        let (status, code) = match &e {
            BrainError::UnknownSession(_) => (S::NOT_FOUND, "UnknownSession"),
            BrainError::NoEntryCategory(_) => (S::NOT_FOUND, "NoEntryCategory"),
            BrainError::SessionAlreadyActive(_) => (S::CONFLICT, "SessionAlreadyActive"),
            BrainError::WozHasControl(_) => (S::CONFLICT, "WozHasControl"),
            BrainError::WozNotActive(_) => (S::CONFLICT, "WozNotActive"),
            BrainError::SessionNotActive(_) => (S::CONFLICT, "SessionNotActive"),
            BrainError::NothingToResume(_) => (S::CONFLICT, "NothingToResume"),
            BrainError::EmptyInput => (S::UNPROCESSABLE_ENTITY, "EmptyInput"),
            BrainError::InvalidId(_) => (S::UNPROCESSABLE_ENTITY, "InvalidId"),
            BrainError::SraiDepthExceeded => (S::INTERNAL_SERVER_ERROR, "SraiDepthExceeded"),
            BrainError::Store(_) => (S::INTERNAL_SERVER_ERROR, "StorageError"),
        };
        if status.is_server_error() {
            tracing::error!(error = %e, "request failed");
        }
        ApiError::new(status, code, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), "InvalidRequest", r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidRequest", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}
