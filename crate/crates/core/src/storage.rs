//! The on-disk document format: one JSON file per annotation document.
//!
//! Keys are written in a fixed order, propositions sorted by id and
//! relations as canonical notation strings, so that saving the same
//! document twice yields identical bytes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnnotationDocument, CaseMetadata, ModelError, PropId, Proposition, PropositionType, Span};
use crate::notation::parse_expr;

pub const FORMAT_VERSION: &str = "1.0";

/// Environment variable naming the guideline version stamped on new
/// documents (and on files that omit the field).
pub const GUIDELINE_VERSION_ENV: &str = "ARGNOTA_GUIDELINE_VERSION";
pub const DEFAULT_GUIDELINE_VERSION: &str = "1.0";

pub fn default_guideline_version() -> String {
    std::env::var(GUIDELINE_VERSION_ENV)
        .ok()
        .filter(|v| !v.trim().is_empty())
        .unwrap_or_else(|| DEFAULT_GUIDELINE_VERSION.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropositionRecord {
    pub id: u32,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[usize; 2]>,
    #[serde(rename = "type")]
    pub ptype: String,
}

/// Serialized form of an [`AnnotationDocument`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentFile {
    pub format_version: String,
    pub doc_id: String,
    pub annotator_id: String,
    #[serde(default = "default_guideline_version")]
    pub guideline_version: String,
    pub metadata: CaseMetadata,
    pub scope_text: String,
    pub propositions: Vec<PropositionRecord>,
    pub relations: Vec<String>,
}

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("format error at {locus}: {message}")]
    Format { locus: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(#[from] ModelError),
}

impl StorageError {
    fn format(locus: impl Into<String>, message: impl Into<String>) -> Self {
        StorageError::Format {
            locus: locus.into(),
            message: message.into(),
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        StorageError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl DocumentFile {
    pub fn from_document(doc: &AnnotationDocument) -> Self {
        let mut propositions: Vec<PropositionRecord> = doc
            .propositions
            .iter()
            .map(|p| PropositionRecord {
                id: p.id.0,
                text: p.text.clone(),
                span: p.span.map(|s| [s.start, s.end]),
                ptype: p.ptype.to_string(),
            })
            .collect();
        propositions.sort_by_key(|p| p.id);
        DocumentFile {
            format_version: FORMAT_VERSION.to_string(),
            doc_id: doc.doc_id.clone(),
            annotator_id: doc.annotator_id.clone(),
            guideline_version: doc.guideline_version.clone(),
            metadata: doc.metadata.clone(),
            scope_text: doc.scope_text.clone(),
            propositions,
            relations: doc.relations.iter().map(|r| r.to_string()).collect(),
        }
    }

    /// Converts to the model, checking only the file format (version, type
    /// codes, notation). Model invariants are left to the caller.
    pub fn into_document(self) -> Result<AnnotationDocument, StorageError> {
        if self.format_version != FORMAT_VERSION {
            return Err(StorageError::format(
                "format_version",
                format!("unsupported version {:?}, expected {FORMAT_VERSION:?}", self.format_version),
            ));
        }
        let mut propositions = Vec::with_capacity(self.propositions.len());
        for (i, rec) in self.propositions.into_iter().enumerate() {
            let ptype: PropositionType = rec
                .ptype
                .parse()
                .map_err(|e: ModelError| StorageError::format(format!("propositions[{i}].type"), e.to_string()))?;
            propositions.push(Proposition {
                id: PropId(rec.id),
                text: rec.text,
                span: rec.span.map(|[s, e]| Span::new(s, e)),
                ptype,
            });
        }
        let relations = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, text)| parse_expr(text).map_err(|d| StorageError::format(format!("relations[{i}]"), d.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnnotationDocument {
            doc_id: self.doc_id,
            annotator_id: self.annotator_id,
            guideline_version: self.guideline_version,
            metadata: self.metadata,
            scope_text: self.scope_text,
            propositions,
            relations,
        })
    }
}

/// Parses document JSON without enforcing model invariants, so that a
/// validator can still report on a broken document.
pub fn parse_document_unchecked(text: &str) -> Result<AnnotationDocument, StorageError> {
    let file: DocumentFile = serde_json::from_str(text)
        .map_err(|e| StorageError::format(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    file.into_document()
}

/// Parses document JSON and checks model invariants.
pub fn parse_document(text: &str) -> Result<AnnotationDocument, StorageError> {
    let doc = parse_document_unchecked(text)?;
    doc.check_invariants()?;
    Ok(doc)
}

/// Canonical JSON text of a document, newline-terminated.
pub fn document_to_string(doc: &AnnotationDocument) -> String {
    let mut text = serde_json::to_string_pretty(&DocumentFile::from_document(doc)).expect("document file serializes");
    text.push('\n');
    text
}

fn read(path: &Path) -> Result<String, StorageError> {
    fs::read_to_string(path).map_err(|e| StorageError::io(path, e))
}

pub fn load_document(path: impl AsRef<Path>) -> Result<AnnotationDocument, StorageError> {
    parse_document(&read(path.as_ref())?)
}

pub fn load_document_unchecked(path: impl AsRef<Path>) -> Result<AnnotationDocument, StorageError> {
    parse_document_unchecked(&read(path.as_ref())?)
}

pub fn save_document(doc: &AnnotationDocument, path: impl AsRef<Path>) -> Result<(), StorageError> {
    let path = path.as_ref();
    fs::write(path, document_to_string(doc)).map_err(|e| StorageError::io(path, e))
}

/// `*.json` files directly inside `dir`, sorted by path.
pub fn document_paths(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, StorageError> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| StorageError::io(dir, e))? {
        let path = entry.map_err(|e| StorageError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
