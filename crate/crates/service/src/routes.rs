use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use argnota_core::agreement::{compare_documents, AgreementError, AgreementReport, DEFAULT_THRESHOLD};
use argnota_core::graph::{GraphError, Role};
use argnota_core::model::{AnnotationDocument, ExprKind};
use argnota_core::notation::parse_expr;
use argnota_core::report::{compare_text, diagnostics_text, document_roles, render_document, roles_text, RenderFormat};
use argnota_core::storage::{parse_document, DocumentFile};
use argnota_core::validation::{validate_document, ValidationMode};

use crate::api::{ApiDiagnostic, ApiEnvelope, ServiceError};
use crate::store::{document_key, DocumentStore, StoreError};

type Store = Arc<DocumentStore>;
type Reply = Result<Response, ServiceError>;

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/documents", get(list_documents))
        .route("/documents/{id}", get(get_document).put(put_document))
        .route("/validate", post(validate))
        .route("/render", post(render))
        .route("/roles", post(roles))
        .route("/compare", post(compare))
        .route("/parse-expr", post(parse_expression))
        .fallback(|| async { ServiceError::NotFound("route".into()) })
        .with_state(store)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentBody {
    pub id: String,
    pub token: String,
    /// The stored file, byte-for-byte as last written.
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PutResult {
    pub id: String,
    pub token: String,
    pub created: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidateRequest {
    pub document: Value,
    #[serde(default)]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateResult {
    pub mode: ValidationMode,
    /// Same text the command line prints.
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenderRequest {
    pub document: Value,
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderResult {
    pub format: RenderFormat,
    pub content: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RolesRequest {
    pub document: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolesResult {
    pub roles: BTreeMap<String, Role>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRequest {
    pub doc_a: Value,
    pub doc_b: Value,
    #[serde(default)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub report: AgreementReport,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParseExprRequest {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseExprResult {
    pub canonical: String,
    pub kind: ExprKind,
}

fn reply<T: Serialize>(envelope: ApiEnvelope<T>) -> Response {
    Json(envelope).into_response()
}

fn body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(bytes).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

/// Format-level parse; model invariants are not checked.
fn document(value: Value, field: &str) -> Result<AnnotationDocument, ServiceError> {
    let file: DocumentFile =
        serde_json::from_value(value).map_err(|e| ServiceError::BadRequest(format!("{field}: {e}")))?;
    file.into_document().map_err(|e| ServiceError::BadRequest(format!("{field}: {e}")))
}

/// Format-level parse followed by the model invariant check; an invariant
/// failure becomes an ok=false envelope rather than an HTTP error.
fn checked_document(value: Value, field: &str) -> Result<Result<AnnotationDocument, ApiDiagnostic>, ServiceError> {
    let doc = document(value, field)?;
    Ok(match doc.check_invariants() {
        Ok(()) => Ok(doc),
        Err(e) => Err(ApiDiagnostic::message("InvariantError", format!("{field}: {e}"))),
    })
}

fn graph_failure(e: GraphError) -> Vec<ApiDiagnostic> {
    match e {
        GraphError::InvalidDocument(ds) => ds.into_iter().map(ApiDiagnostic::Validation).collect(),
    }
}

fn store_error(e: StoreError) -> ServiceError {
    match e {
        StoreError::BadId(_) => ServiceError::BadRequest(e.to_string()),
        StoreError::NotFound(id) => ServiceError::NotFound(id),
        StoreError::Stale { .. } => ServiceError::Conflict(e.to_string()),
        StoreError::Io(e) => ServiceError::Internal(e.to_string()),
    }
}

fn etag(token: &str) -> (header::HeaderName, String) {
    (header::ETAG, format!("\"{token}\""))
}

async fn list_documents(State(store): State<Store>) -> Reply {
    let ids = store.list().await.map_err(store_error)?;
    Ok(reply(ApiEnvelope::success(ids)))
}

async fn get_document(State(store): State<Store>, Path(id): Path<String>) -> Reply {
    let (bytes, token) = store.get(&id).await.map_err(store_error)?;
    let content = String::from_utf8(bytes).map_err(|_| ServiceError::Internal(format!("{id} is not UTF-8")))?;
    let tag = etag(&token);
    Ok(([tag], reply(ApiEnvelope::success(DocumentBody { id, token, content }))).into_response())
}

/// The token a PUT claims to have read, from `If-Match` (quotes and a weak
/// prefix are ignored).
fn if_match(headers: &HeaderMap) -> Result<Option<String>, ServiceError> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    let value = value
        .to_str()
        .map_err(|_| ServiceError::BadRequest("If-Match is not ASCII".into()))?
        .trim();
    Ok(Some(value.trim_start_matches("W/").trim_matches('"').to_string()))
}

async fn put_document(State(store): State<Store>, Path(id): Path<String>, headers: HeaderMap, bytes: Bytes) -> Reply {
    let expected = if_match(&headers)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| ServiceError::BadRequest("body is not UTF-8".into()))?;
    let doc = parse_document(text).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let key = document_key(&doc.doc_id, &doc.annotator_id);
    if key != id {
        return Err(ServiceError::BadRequest(format!("document key is {key:?}, not {id:?}")));
    }
    let (token, created) = store.put(&id, &bytes, expected.as_deref()).await.map_err(store_error)?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    let tag = etag(&token);
    Ok((status, [tag], reply(ApiEnvelope::success(PutResult { id, token, created }))).into_response())
}

async fn validate(bytes: Bytes) -> Reply {
    let req: ValidateRequest = body(&bytes)?;
    let mode = match req.mode.as_deref() {
        None => ValidationMode::default(),
        Some(m) => m.parse().map_err(ServiceError::BadRequest)?,
    };
    let doc = document(req.document, "document")?;
    let diagnostics = validate_document(&doc, mode);
    let text = diagnostics_text(&diagnostics);
    let diagnostics = diagnostics.into_iter().map(ApiDiagnostic::Validation).collect();
    Ok(reply(ApiEnvelope::new(Some(ValidateResult { mode, text }), diagnostics)))
}

async fn render(bytes: Bytes) -> Reply {
    let req: RenderRequest = body(&bytes)?;
    let format: RenderFormat = req.format.parse().map_err(ServiceError::BadRequest)?;
    let doc = match checked_document(req.document, "document")? {
        Ok(doc) => doc,
        Err(d) => return Ok(reply(ApiEnvelope::<RenderResult>::failure(vec![d]))),
    };
    Ok(reply(match render_document(&doc, format) {
        Ok(content) => ApiEnvelope::success(RenderResult { format, content }),
        Err(e) => ApiEnvelope::failure(graph_failure(e)),
    }))
}

async fn roles(bytes: Bytes) -> Reply {
    let req: RolesRequest = body(&bytes)?;
    let doc = match checked_document(req.document, "document")? {
        Ok(doc) => doc,
        Err(d) => return Ok(reply(ApiEnvelope::<RolesResult>::failure(vec![d]))),
    };
    Ok(reply(match document_roles(&doc) {
        Ok(assignment) => ApiEnvelope::success(RolesResult {
            text: roles_text(&assignment),
            roles: assignment.roles.iter().map(|(id, r)| (id.to_string(), *r)).collect(),
        }),
        Err(e) => ApiEnvelope::failure(graph_failure(e)),
    }))
}

fn agreement_code(e: &AgreementError) -> &'static str {
    match e {
        AgreementError::ScopeMismatch => "ScopeMismatch",
        AgreementError::MissingSpans { .. } => "MissingSpans",
        AgreementError::EmptyAlignment => "EmptyAlignment",
        AgreementError::DegenerateMarginals => "DegenerateMarginals",
    }
}

async fn compare(bytes: Bytes) -> Reply {
    let req: CompareRequest = body(&bytes)?;
    let threshold = req.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(ServiceError::BadRequest(format!("threshold {threshold} outside [0, 1]")));
    }
    let a = checked_document(req.doc_a, "doc_a")?;
    let b = checked_document(req.doc_b, "doc_b")?;
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            let diagnostics = [a.err(), b.err()].into_iter().flatten().collect();
            return Ok(reply(ApiEnvelope::<CompareResult>::failure(diagnostics)));
        }
    };
    Ok(reply(match compare_documents(&a, &b, threshold) {
        Ok(report) => ApiEnvelope::success(CompareResult {
            text: compare_text(&report),
            report,
        }),
        Err(e) => ApiEnvelope::failure(vec![ApiDiagnostic::message(agreement_code(&e), e.to_string())]),
    }))
}

async fn parse_expression(bytes: Bytes) -> Reply {
    let req: ParseExprRequest = body(&bytes)?;
    Ok(reply(match parse_expr(&req.text) {
        Ok(expr) => ApiEnvelope::success(ParseExprResult {
            canonical: expr.to_string(),
            kind: expr.kind(),
        }),
        Err(d) => ApiEnvelope::failure(vec![ApiDiagnostic::Parse(d)]),
    }))
}
