//! HTTP facade over `argnota-core`.
//!
//! Every response body is an [`ApiEnvelope`]. Documents live as JSON files
//! under a root directory, one per `(doc_id, annotator_id)` pair, and are
//! guarded by content tokens for optimistic concurrency.

mod api;
mod routes;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;

pub use api::{ApiDiagnostic, ApiEnvelope, ServiceError};
pub use routes::{
    CompareRequest, CompareResult, DocumentBody, ParseExprRequest, ParseExprResult, PutResult, RenderRequest,
    RenderResult, RolesRequest, RolesResult, ValidateRequest, ValidateResult,
};
pub use store::{document_key, document_version_token, DocumentStore, StoreError};

/// Builds the router serving documents stored under `root`.
pub fn app(root: impl Into<PathBuf>) -> Router {
    routes::router(Arc::new(DocumentStore::new(root)))
}

/// Serves until the process is stopped.
pub async fn serve(root: impl Into<PathBuf>, bind: SocketAddr) -> std::io::Result<()> {
    let root = root.into();
    if !root.is_dir() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} is not a directory", root.display()),
        ));
    }
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!("serving {} on {}", root.display(), listener.local_addr()?);
    axum::serve(listener, app(root)).await
}
