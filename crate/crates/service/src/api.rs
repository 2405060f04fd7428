use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use argnota_core::notation::ParseDiagnostic;
use argnota_core::validation::{Diagnostic, Severity};

/// Wrapper around every response body. `ok` is false whenever an
/// Error-severity diagnostic is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiEnvelope<T> {
    pub ok: bool,
    pub result: Option<T>,
    pub diagnostics: Vec<ApiDiagnostic>,
}

/// A validator diagnostic, a notation parse failure, or a plain message
/// (always an error) for everything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ApiDiagnostic {
    Validation(Diagnostic),
    Parse(ParseDiagnostic),
    Message { severity: Severity, code: String, message: String },
}

impl ApiDiagnostic {
    pub fn message(code: &str, message: impl Into<String>) -> Self {
        ApiDiagnostic::Message {
            severity: Severity::Error,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        match self {
            ApiDiagnostic::Validation(d) => d.is_error(),
            ApiDiagnostic::Parse(_) => true,
            ApiDiagnostic::Message { severity, .. } => *severity == Severity::Error,
        }
    }
}

impl<T> ApiEnvelope<T> {
    pub fn new(result: Option<T>, diagnostics: Vec<ApiDiagnostic>) -> Self {
        ApiEnvelope {
            ok: !diagnostics.iter().any(ApiDiagnostic::is_error),
            result,
            diagnostics,
        }
    }

    pub fn success(result: T) -> Self {
        Self::new(Some(result), Vec::new())
    }

    pub fn failure(diagnostics: Vec<ApiDiagnostic>) -> Self {
        ApiEnvelope {
            ok: false,
            result: None,
            diagnostics,
        }
    }
}

/// Request-level failures, each mapped to an HTTP status.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("no document {0:?}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    fn status(&self) -> StatusCode {
        match self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::NotFound(_) => "NotFound",
            ServiceError::Conflict(_) => "Conflict",
            ServiceError::Internal(_) => "Internal",
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if let ServiceError::Internal(msg) = &self {
            tracing::error!("{msg}");
        }
        let body = ApiEnvelope::<()>::failure(vec![ApiDiagnostic::message(self.code(), self.to_string())]);
        (self.status(), Json(body)).into_response()
    }
}
