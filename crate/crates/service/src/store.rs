use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Content-addressed version token: hex SHA-256 of the stored bytes.
pub fn document_version_token(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Storage key of a document.
pub fn document_key(doc_id: &str, annotator_id: &str) -> String {
    format!("{doc_id}__{annotator_id}")
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid document id {0:?}")]
    BadId(String),
    #[error("no document {0:?}")]
    NotFound(String),
    #[error("version token {given:?} does not match current {current:?}")]
    Stale { given: Option<String>, current: Option<String> },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Documents as files named `<key>.json` under a root directory. Writes to
/// one key are serialized; reads never block.
pub struct DocumentStore {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

fn check_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::BadId(id.to_string()))
    }
}

impl DocumentStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DocumentStore {
            root: root.into(),
            locks: Mutex::new(HashMap::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, id: &str) -> Result<PathBuf, StoreError> {
        check_id(id)?;
        Ok(self.root.join(format!("{id}.json")))
    }

    fn lock(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }

    pub async fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut ids = Vec::new();
        let mut dir = tokio::fs::read_dir(&self.root).await?;
        while let Some(entry) = dir.next_entry().await? {
            let name = entry.file_name();
            let Some(id) = name.to_str().and_then(|n| n.strip_suffix(".json")) else {
                continue;
            };
            if check_id(id).is_ok() && entry.file_type().await?.is_file() {
                ids.push(id.to_string());
            }
        }
        ids.sort();
        Ok(ids)
    }

    async fn read_opt(&self, id: &str) -> Result<Option<Vec<u8>>, StoreError> {
        match tokio::fs::read(self.path(id)?).await {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Stored bytes and their token.
    pub async fn get(&self, id: &str) -> Result<(Vec<u8>, String), StoreError> {
        let bytes = self.read_opt(id).await?.ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        let token = document_version_token(&bytes);
        Ok((bytes, token))
    }

    /// Writes `bytes` if `expected` names the current version (`None` for a
    /// document that does not exist yet). Returns the new token and whether
    /// the document was created.
    pub async fn put(&self, id: &str, bytes: &[u8], expected: Option<&str>) -> Result<(String, bool), StoreError> {
        let path = self.path(id)?;
        let lock = self.lock(id);
        let _guard = lock.lock().await;
        let current = self.read_opt(id).await?.map(|b| document_version_token(&b));
        if current.as_deref() != expected {
            return Err(StoreError::Stale {
                given: expected.map(str::to_string),
                current,
            });
        }
        let tmp = self.root.join(format!(".{id}.tmp"));
        tokio::fs::write(&tmp, bytes).await?;
        tokio::fs::rename(&tmp, &path).await?;
        Ok((document_version_token(bytes), current.is_none()))
    }
}
