//! Document store, pipeline job loop, playback sessions and the HTTP/JSON API.

pub mod api;
pub mod pipeline;
pub mod playback;
pub mod store;

use thiserror::Error;

use crate::doc::DocError;
use crate::text::TextError;
use crate::tts::TtsError;

pub use api::{router, serve_http, AppState};
pub use pipeline::{job_loop, process_job, JobLog, JobOutcome};
pub use playback::{transition, Command, PlaybackSession, PlaybackState, Position, SessionView, SpeechPlan};
pub use store::{DocumentRecord, DocumentStore, DocumentSummary};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown document {0:?}")]
    UnknownDocument(String),
    #[error("document has no sentences")]
    EmptyDocument,
    #[error("{0}")]
    BadParams(String),
    #[error("unknown voice {0:?}")]
    UnknownVoice(String),
    #[error("{cmd:?} is not allowed while {state:?}")]
    InvalidTransition { state: PlaybackState, cmd: Command },
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session is {0:?}, not Playing")]
    NotPlaying(PlaybackState),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Document(#[from] DocError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("store: {0}")]
    Store(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ServiceError {
    /// Machine-readable name carried in error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownDocument(_) => "UnknownDocument",
            ServiceError::EmptyDocument => "EmptyDocument",
            ServiceError::BadParams(_) => "BadParams",
            ServiceError::UnknownVoice(_) => "UnknownVoice",
            ServiceError::InvalidTransition { .. } => "InvalidTransition",
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::NotPlaying(_) => "NotPlaying",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Document(e) => e.code(),
            ServiceError::Text(TextError::EmptyQuery) => "EmptyQuery",
            ServiceError::Text(TextError::BadColor(_)) => "BadColor",
            ServiceError::Text(_) => "BadRequest",
            ServiceError::Store(_) => "StoreError",
            ServiceError::Io(_) => "IoError",
        }
    }
}

impl From<TtsError> for ServiceError {
    fn from(e: TtsError) -> Self {
        match e {
            TtsError::UnknownVoice(v) => ServiceError::UnknownVoice(v),
            TtsError::BadParams(m) => ServiceError::BadParams(m),
            other => ServiceError::Store(other.to_string()),
        }
    }
}
