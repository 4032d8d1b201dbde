use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use lectern::session::{router, AppState, DocumentStore, PlaybackState};
use lectern::tts::{decode_wav, speak, SynthesisParams};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(AppState::new(Arc::new(DocumentStore::in_memory())))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = raw(app, method, uri, body.map(|b| ("application/json", b.to_string().into_bytes()))).await;
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn raw(app: &Router, method: Method, uri: &str, body: Option<(&str, Vec<u8>)>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some((ct, b)) => {
            req = req.header("content-type", ct);
            Body::from(b)
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn upload(app: &Router, text: &str) -> String {
    let (s, v) = raw(app, Method::POST, "/documents?name=t.txt&kind=plain_text", Some(("text/plain", text.as_bytes().to_vec()))).await;
    assert_eq!(s, StatusCode::CREATED);
    let v: Value = serde_json::from_slice(&v).unwrap();
    v["id"].as_str().unwrap().to_string()
}

async fn new_session(app: &Router, doc: &str) -> String {
    let (s, v) = call(app, Method::POST, "/sessions", Some(json!({"document_id": doc}))).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["state"], "Idle");
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn documents_roundtrip() {
    let app = app();
    let (s, v) = raw(&app, Method::POST, "/documents", Some(("text/plain", b"Hi.".to_vec()))).await;
    assert_eq!(s, StatusCode::CREATED);
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert_eq!((v["char_count"].as_u64(), v["sentence_count"].as_u64()), (Some(3), Some(1)));
    let id = v["id"].as_str().unwrap();

    let (s, v) = call(&app, Method::GET, &format!("/documents/{id}/text"), None).await;
    assert_eq!((s, v), (StatusCode::OK, json!({"text": "Hi."})));
    let (_, v) = call(&app, Method::GET, "/documents", None).await;
    assert_eq!(v["documents"][0]["id"], id);

    let (s, _) = call(&app, Method::GET, "/documents/d99/text", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn multipart_upload() {
    let app = app();
    let boundary = "XyZ";
    let body = format!(
        "--{boundary}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"note.txt\"\r\n\
         Content-Type: text/plain\r\n\r\nOne. Two.\r\n--{boundary}--\r\n"
    );
    let ct = format!("multipart/form-data; boundary={boundary}");
    let (s, v) = raw(&app, Method::POST, "/documents", Some((&ct, body.into_bytes()))).await;
    assert_eq!(s, StatusCode::CREATED, "{}", String::from_utf8_lossy(&v));
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert_eq!(v["sentence_count"], 2);
    let (_, v) = call(&app, Method::GET, "/documents", None).await;
    assert_eq!(v["documents"][0]["name"], "note.txt");
}

#[tokio::test]
async fn bad_uploads_carry_codes() {
    let app = app();
    let (s, v) = raw(&app, Method::POST, "/documents?kind=pdf", Some(("application/pdf", b"nope".to_vec()))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert_eq!(v["code"], "UnsupportedFormat");
    let (_, v) = raw(&app, Method::POST, "/documents", Some(("text/plain", vec![]))).await;
    assert_eq!(serde_json::from_slice::<Value>(&v).unwrap()["code"], "EmptyInput");
}

#[tokio::test]
async fn search_returns_colored_spans() {
    let app = app();
    let id = upload(&app, "The cat saw the CAT.").await;
    let (s, v) = call(&app, Method::POST, &format!("/documents/{id}/search"), Some(json!({"query": "cat", "case_sensitive": false, "color": "#ff0000"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({"spans": [{"start": 4, "end": 7, "color": "#ff0000"}, {"start": 16, "end": 19, "color": "#ff0000"}]}));
    let (_, v) = call(&app, Method::POST, &format!("/documents/{id}/search"), Some(json!({"query": "dog"}))).await;
    assert_eq!(v, json!({"spans": []}));
    let (s, v) = call(&app, Method::POST, &format!("/documents/{id}/search"), Some(json!({"query": "", "color": "#ff0000"}))).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("EmptyQuery")));
    let (_, v) = call(&app, Method::POST, &format!("/documents/{id}/search"), Some(json!({"query": "a", "color": "red"}))).await;
    assert_eq!(v["code"], "BadParams");
}

#[tokio::test]
async fn voices_listed() {
    let (s, v) = call(&app(), Method::GET, "/voices", None).await;
    assert_eq!(s, StatusCode::OK);
    let names: Vec<&str> = v["voices"].as_array().unwrap().iter().map(|v| v["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"adult-male") && names.contains(&"adult-female"));
    assert!(v["voices"][0]["base_f0"].is_number());
}

#[tokio::test]
async fn session_errors() {
    let app = app();
    let (s, v) = call(&app, Method::POST, "/sessions/bad/commands", Some(json!({"cmd": "play"}))).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownSession")));
    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"document_id": "d7"}))).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownDocument")));
    let id = upload(&app, "Hi.").await;
    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"document_id": id, "rate": 5.0}))).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("BadParams")));
    let blank = upload(&app, "   ").await;
    let (_, v) = call(&app, Method::POST, "/sessions", Some(json!({"document_id": blank}))).await;
    assert_eq!(v["code"], "EmptyDocument");

    let sid = new_session(&app, &id).await;
    let (s, v) = call(&app, Method::POST, &format!("/sessions/{sid}/commands"), Some(json!({"cmd": "pause"}))).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::CONFLICT, Some("InvalidTransition")));
    let (_, v) = call(&app, Method::POST, &format!("/sessions/{sid}/commands"), Some(json!({"cmd": "jump"}))).await;
    assert_eq!(v["code"], "BadParams");
    let (s, v) = call(&app, Method::GET, &format!("/sessions/{sid}/audio"), None).await;
    assert_eq!((s, v["code"].as_str()), (StatusCode::CONFLICT, Some("NotPlaying")));
    let (_, v) = call(&app, Method::PATCH, &format!("/sessions/{sid}"), Some(json!({"rate": 0.1}))).await;
    assert_eq!(v["code"], "BadParams");
}

#[tokio::test]
async fn pause_reports_position_and_params() {
    let app = app();
    let id = upload(&app, "One sentence. Another sentence.").await;
    let sid = new_session(&app, &id).await;
    let (_, v) = call(&app, Method::POST, &format!("/sessions/{sid}/commands"), Some(json!({"cmd": "play"}))).await;
    assert_eq!(v, json!({"state": "Playing", "position": {"sentence_index": 0, "sample_offset": 0}}));
    let (_, v) = call(&app, Method::POST, &format!("/sessions/{sid}/commands"), Some(json!({"cmd": "pause"}))).await;
    assert_eq!(v["state"], "Paused");
    let (_, v) = call(&app, Method::PATCH, &format!("/sessions/{sid}"), Some(json!({"volume": 0.25}))).await;
    assert_eq!(v["params"]["volume"], 0.25);
    let (s, v) = call(&app, Method::GET, &format!("/sessions/{sid}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["state"], "Paused");
    assert_eq!(v["position"]["sentence_index"], 0);
    assert!(v["position"]["sample_offset"].is_number());
    assert_eq!(v["params"], json!({"rate": 1.0, "volume": 0.25, "voice": "adult-male"}));
}

#[tokio::test]
async fn audio_stream_equals_direct_synthesis() {
    let app = app();
    let text = "First sentence here. And a second one!";
    let id = upload(&app, text).await;
    let sid = new_session(&app, &id).await;
    call(&app, Method::POST, &format!("/sessions/{sid}/commands"), Some(json!({"cmd": "play"}))).await;
    let (s, bytes) = raw(&app, Method::GET, &format!("/sessions/{sid}/audio"), None).await;
    assert_eq!(s, StatusCode::OK);
    let clip = decode_wav(&bytes).unwrap();
    assert_eq!(clip.samples, speak(text, &SynthesisParams::default()).unwrap().samples);
    let (_, v) = call(&app, Method::GET, &format!("/sessions/{sid}"), None).await;
    assert_eq!(v["state"], serde_json::to_value(PlaybackState::Stopped).unwrap());
}
