//! Job loop: watch events in, stored documents out. A failing job is
//! recorded and the loop moves on.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use tokio::sync::mpsc;

use super::store::{DocumentRecord, DocumentStore};
use super::ServiceError;
use crate::doc::{extract_text, DocumentSource};
use crate::ingest::WatchEvent;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobOutcome {
    pub path: PathBuf,
    /// Document id on success.
    pub document_id: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct JobLog(Arc<Mutex<Vec<JobOutcome>>>);

impl JobLog {
    pub fn outcomes(&self) -> Vec<JobOutcome> {
        self.0.lock().expect("job log").clone()
    }

    fn push(&self, o: JobOutcome) {
        self.0.lock().expect("job log").push(o);
    }
}

pub fn process_job(store: &DocumentStore, path: &Path) -> Result<Arc<DocumentRecord>, ServiceError> {
    let source = DocumentSource::from_path(path)?;
    let doc = extract_text(&source)?;
    store.add(&source.name, source.kind, doc.pages)
}

/// Processes events strictly in arrival order until the sender closes.
pub async fn job_loop(mut rx: mpsc::Receiver<WatchEvent>, store: Arc<DocumentStore>, log: JobLog) {
    while let Some(event) = rx.recv().await {
        let store = store.clone();
        let path = event.path.clone();
        let result = tokio::task::spawn_blocking(move || process_job(&store, &path))
            .await
            .unwrap_or_else(|e| Err(ServiceError::Store(format!("job panicked: {e}"))));
        let outcome = match result {
            Ok(doc) => {
                log::info!("{} stored as {}", event.path.display(), doc.id);
                JobOutcome { path: event.path, document_id: Some(doc.id.clone()), error: None }
            }
            Err(e) => {
                log::warn!("{}: {e}", event.path.display());
                JobOutcome { path: event.path, document_id: None, error: Some(format!("{}: {e}", e.code())) }
            }
        };
        log.push(outcome);
    }
}
