use std::collections::HashMap;
use std::convert::Infallible;
use std::future::Future;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::body::{Body, Bytes};
use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::StreamExt as _;
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;

use super::playback::{Command, PlaybackSession, PlaybackState};
use super::store::DocumentStore;
use super::ServiceError;
use crate::doc::{extract_text, DocumentSource, SourceKind};
use crate::text::{search_text, DisplayPrefs, Rgb};
use crate::tts::wav::{samples_to_bytes, wav_header};
use crate::tts::{list_voices, SynthesisParams, DEFAULT_VOICE, SAMPLE_RATE};

/// Samples per streamed body chunk.
pub const STREAM_CHUNK: usize = 4096;

type SharedSession = Arc<Mutex<PlaybackSession>>;

#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<DocumentStore>,
    sessions: Arc<RwLock<HashMap<String, SharedSession>>>,
    next_session: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(store: Arc<DocumentStore>) -> Self {
        AppState { store, sessions: Arc::default(), next_session: Arc::new(AtomicU64::new(1)) }
    }

    pub fn create_session(&self, document_id: &str, params: SynthesisParams) -> Result<SharedSession, ServiceError> {
        let doc = self.store.get(document_id)?;
        let id = format!("s{}", self.next_session.fetch_add(1, Ordering::Relaxed));
        let session = Arc::new(Mutex::new(PlaybackSession::new(id.clone(), doc.id.clone(), &doc.sentences, params)?));
        self.sessions.write().expect("session map").insert(id, session.clone());
        Ok(session)
    }

    pub fn session(&self, id: &str) -> Result<SharedSession, ServiceError> {
        self.sessions.read().expect("session map").get(id).cloned().ok_or_else(|| ServiceError::UnknownSession(id.into()))
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownDocument(_) | ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::InvalidTransition { .. } | ServiceError::NotPlaying(_) => StatusCode::CONFLICT,
            ServiceError::Document(crate::doc::DocError::Io(_)) | ServiceError::Store(_) | ServiceError::Io(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
            ServiceError::Document(_) | ServiceError::EmptyDocument => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        (status, Json(json!({ "code": self.code(), "message": self.to_string() }))).into_response()
    }
}

/// JSON body whose rejections use the service error shape.
struct JsonBody<T>(T);

impl<S: Send + Sync, T: serde::de::DeserializeOwned> FromRequest<S> for JsonBody<T> {
    type Rejection = ServiceError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(JsonBody(v)),
            Err(e @ JsonRejection::JsonDataError(_)) => Err(ServiceError::BadParams(e.body_text())),
            Err(e) => Err(ServiceError::BadRequest(e.body_text())),
        }
    }
}

type ApiResult = Result<Response, ServiceError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/documents", post(create_document).get(list_documents))
        .route("/documents/{id}/text", get(document_text))
        .route("/documents/{id}/search", post(search_document))
        .route("/voices", get(voices))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).patch(patch_session))
        .route("/sessions/{id}/commands", post(session_command))
        .route("/sessions/{id}/audio", get(session_audio))
        .layer(axum::extract::DefaultBodyLimit::max(crate::ingest::MAX_PAYLOAD as usize))
        .with_state(state)
}

pub async fn serve_http(listener: TcpListener, state: AppState, shutdown: impl Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

#[derive(Debug, Deserialize)]
struct UploadQuery {
    name: Option<String>,
    kind: Option<SourceKind>,
}

fn resolve_kind(name: &str, kind: Option<SourceKind>) -> SourceKind {
    kind.or_else(|| SourceKind::from_path(std::path::Path::new(name))).unwrap_or(SourceKind::PlainText)
}

/// Multipart with a `file` part (plus optional `name` and `kind` fields), or
/// a raw body with `?name=&kind=`.
async fn create_document(State(st): State<AppState>, req: Request) -> ApiResult {
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let (name, kind, bytes) = if is_multipart {
        let mut mp = Multipart::from_request(req, &st).await.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
        let (mut name, mut kind, mut bytes) = (None, None, None);
        while let Some(field) = mp.next_field().await.map_err(|e| ServiceError::BadRequest(e.body_text()))? {
            let field_name = field.name().unwrap_or_default().to_string();
            let file_name = field.file_name().map(str::to_string);
            let data = field.bytes().await.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
            match field_name.as_str() {
                "name" => name = Some(String::from_utf8_lossy(&data).into_owned()),
                "kind" => {
                    let k = String::from_utf8_lossy(&data);
                    kind = Some(
                        serde_json::from_value(json!(k.trim()))
                            .map_err(|_| ServiceError::BadParams(format!("unknown kind {k:?}")))?,
                    );
                }
                "file" | "text" => {
                    name = name.or(file_name);
                    bytes = Some(data);
                }
                _ => {}
            }
        }
        let bytes = bytes.ok_or_else(|| ServiceError::BadRequest("missing file part".into()))?;
        (name, kind, bytes)
    } else {
        let Query(q) = Query::<UploadQuery>::try_from_uri(req.uri()).map_err(|e| ServiceError::BadParams(e.body_text()))?;
        let bytes = axum::body::to_bytes(req.into_body(), usize::MAX).await.map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        (q.name, q.kind, bytes)
    };
    let name = name.unwrap_or_else(|| "untitled.txt".into());
    let kind = resolve_kind(&name, kind);
    let store = st.store.clone();
    let record = tokio::task::spawn_blocking(move || -> Result<_, ServiceError> {
        let source = DocumentSource::new(kind, bytes.to_vec(), name.clone())?;
        let doc = extract_text(&source)?;
        store.add(&name, kind, doc.pages)
    })
    .await
    .map_err(|e| ServiceError::Store(e.to_string()))??;
    let body = json!({ "id": record.id, "char_count": record.char_count(), "sentence_count": record.sentences.len() });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn list_documents(State(st): State<AppState>) -> ApiResult {
    Ok(Json(json!({ "documents": st.store.list() })).into_response())
}

async fn document_text(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    Ok(Json(json!({ "text": st.store.get(&id)?.text })).into_response())
}

#[derive(Debug, Deserialize)]
struct SearchBody {
    query: String,
    #[serde(default)]
    case_sensitive: bool,
    color: Option<Rgb>,
}

async fn search_document(State(st): State<AppState>, Path(id): Path<String>, JsonBody(b): JsonBody<SearchBody>) -> ApiResult {
    let doc = st.store.get(&id)?;
    let color = b.color.unwrap_or(DisplayPrefs::default().highlight_color);
    let spans = search_text(&doc.text, &b.query, b.case_sensitive, color)?;
    Ok(Json(json!({ "spans": spans })).into_response())
}

async fn voices() -> ApiResult {
    Ok(Json(json!({ "voices": list_voices() })).into_response())
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    document_id: String,
    voice: Option<String>,
    rate: Option<f64>,
    volume: Option<f64>,
}

async fn create_session(State(st): State<AppState>, JsonBody(b): JsonBody<CreateSession>) -> ApiResult {
    let params = SynthesisParams {
        rate: b.rate.unwrap_or(1.0),
        volume: b.volume.unwrap_or(1.0),
        voice: b.voice.unwrap_or_else(|| DEFAULT_VOICE.to_string()),
    };
    let s = st.create_session(&b.document_id, params)?;
    let s = s.lock().expect("session");
    Ok((StatusCode::CREATED, Json(json!({ "id": s.id, "state": s.state() }))).into_response())
}

async fn get_session(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let view = st.session(&id)?.lock().expect("session").view();
    Ok(Json(view).into_response())
}

#[derive(Debug, Deserialize)]
struct CommandBody {
    cmd: Command,
}

async fn session_command(State(st): State<AppState>, Path(id): Path<String>, JsonBody(b): JsonBody<CommandBody>) -> ApiResult {
    let s = st.session(&id)?;
    let mut s = s.lock().expect("session");
    let state = s.command(b.cmd)?;
    Ok(Json(json!({ "state": state, "position": s.position() })).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchBody {
    rate: Option<f64>,
    volume: Option<f64>,
}

async fn patch_session(State(st): State<AppState>, Path(id): Path<String>, JsonBody(b): JsonBody<PatchBody>) -> ApiResult {
    let s = st.session(&id)?;
    let mut s = s.lock().expect("session");
    let params = s.set_params(b.rate, b.volume)?.clone();
    Ok(Json(json!({ "params": params })).into_response())
}

#[derive(Debug, Deserialize)]
struct AudioQuery {
    /// `realtime` sleeps one chunk duration between chunks.
    pace: Option<String>,
}

/// The header length covers the remaining plan at request time. The body ends
/// early if the session leaves Playing.
async fn session_audio(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<AudioQuery>) -> ApiResult {
    let session = st.session(&id)?;
    let remaining = {
        let s = session.lock().expect("session");
        if s.state() != PlaybackState::Playing {
            return Err(ServiceError::NotPlaying(s.state()));
        }
        s.remaining_samples()
    };
    let realtime = q.pace.as_deref() == Some("realtime");
    let header = Bytes::copy_from_slice(&wav_header(SAMPLE_RATE, remaining));
    let chunks = futures::stream::unfold((session, true), move |(session, first)| async move {
        if !first && realtime {
            tokio::time::sleep(Duration::from_secs_f64(STREAM_CHUNK as f64 / f64::from(SAMPLE_RATE))).await;
        }
        let samples = session.lock().expect("session").read(STREAM_CHUNK).unwrap_or_default();
        if samples.is_empty() {
            None
        } else {
            Some((Ok::<_, Infallible>(Bytes::from(samples_to_bytes(&samples))), (session, false)))
        }
    });
    let body = futures::stream::once(async move { Ok::<_, Infallible>(header) }).chain(chunks);
    Ok(([(header::CONTENT_TYPE, "audio/wav")], Body::from_stream(body)).into_response())
}
