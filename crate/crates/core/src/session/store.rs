//! Document store: `<id>.txt` files in saved-text form plus `manifest.json`.
//! One writer, many readers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::doc::SourceKind;
use crate::text::{format_saved, read_saved};
use crate::tts::split_sentences;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentRecord {
    pub id: String,
    pub name: String,
    pub source_kind: SourceKind,
    pub pages: Vec<String>,
    /// Pages joined by form feed.
    pub text: String,
    pub sentences: Vec<String>,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

impl DocumentRecord {
    pub fn new(id: String, name: String, source_kind: SourceKind, pages: Vec<String>, created_at: u64) -> Self {
        let text = pages.join(&crate::text::PAGE_SEPARATOR.to_string());
        let sentences = split_sentences(&text);
        DocumentRecord { id, name, source_kind, pages, text, sentences, created_at }
    }

    pub fn char_count(&self) -> usize {
        self.text.chars().count()
    }

    pub fn summary(&self) -> DocumentSummary {
        DocumentSummary {
            id: self.id.clone(),
            name: self.name.clone(),
            source_kind: self.source_kind,
            char_count: self.char_count(),
            sentence_count: self.sentences.len(),
            created_at: self.created_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub id: String,
    pub name: String,
    pub source_kind: SourceKind,
    pub char_count: usize,
    pub sentence_count: usize,
    pub created_at: u64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    next_id: u64,
    documents: Vec<DocumentSummary>,
}

#[derive(Debug, Default)]
struct Inner {
    next_id: u64,
    docs: BTreeMap<u64, Arc<DocumentRecord>>,
}

#[derive(Debug)]
pub struct DocumentStore {
    dir: Option<PathBuf>,
    inner: RwLock<Inner>,
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn id_string(n: u64) -> String {
    format!("d{n}")
}

fn parse_id(id: &str) -> Option<u64> {
    id.strip_prefix('d')?.parse().ok()
}

impl DocumentStore {
    /// Not persisted anywhere.
    pub fn in_memory() -> Self {
        DocumentStore { dir: None, inner: RwLock::new(Inner { next_id: 1, docs: BTreeMap::new() }) }
    }

    /// Creates the directory if needed and loads every manifest entry.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let manifest: Manifest = match std::fs::read(dir.join(MANIFEST)) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| ServiceError::Store(format!("{}: {e}", dir.join(MANIFEST).display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Manifest { next_id: 1, documents: Vec::new() },
            Err(e) => return Err(e.into()),
        };
        let mut docs = BTreeMap::new();
        for s in manifest.documents {
            let n = parse_id(&s.id).ok_or_else(|| ServiceError::Store(format!("bad document id {:?}", s.id)))?;
            let pages = read_saved(dir.join(format!("{}.txt", s.id)))?;
            docs.insert(n, Arc::new(DocumentRecord::new(s.id, s.name, s.source_kind, pages, s.created_at)));
        }
        let next_id = manifest.next_id.max(docs.keys().next_back().map_or(1, |k| k + 1));
        Ok(DocumentStore { dir: Some(dir), inner: RwLock::new(Inner { next_id, docs }) })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn add(&self, name: &str, kind: SourceKind, pages: Vec<String>) -> Result<Arc<DocumentRecord>, ServiceError> {
        let mut inner = self.inner.write().expect("store lock");
        let n = inner.next_id;
        let record = Arc::new(DocumentRecord::new(id_string(n), name.to_string(), kind, pages, now_secs()));
        if let Some(dir) = &self.dir {
            write_atomic(&dir.join(format!("{}.txt", record.id)), format_saved(&record.pages).as_bytes())?;
        }
        inner.next_id = n + 1;
        inner.docs.insert(n, record.clone());
        if let Some(dir) = &self.dir {
            write_manifest(dir, &inner)?;
        }
        Ok(record)
    }

    pub fn get(&self, id: &str) -> Result<Arc<DocumentRecord>, ServiceError> {
        let inner = self.inner.read().expect("store lock");
        parse_id(id)
            .and_then(|n| inner.docs.get(&n).cloned())
            .ok_or_else(|| ServiceError::UnknownDocument(id.to_string()))
    }

    /// In creation order.
    pub fn list(&self) -> Vec<DocumentSummary> {
        self.inner.read().expect("store lock").docs.values().map(|d| d.summary()).collect()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("store lock").docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flush(&self) -> Result<(), ServiceError> {
        match &self.dir {
            Some(dir) => write_manifest(dir, &self.inner.read().expect("store lock")),
            None => Ok(()),
        }
    }
}

fn write_manifest(dir: &Path, inner: &Inner) -> Result<(), ServiceError> {
    let m = Manifest { next_id: inner.next_id, documents: inner.docs.values().map(|d| d.summary()).collect() };
    let json = serde_json::to_vec_pretty(&m).map_err(|e| ServiceError::Store(e.to_string()))?;
    write_atomic(&dir.join(MANIFEST), &json)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ServiceError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
