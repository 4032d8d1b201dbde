use std::future::Future;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use lectern::ingest::{watch, IngestServer, Watcher, POLL_PERIOD};
use lectern::session::{job_loop, serve_http, AppState, DocumentStore, JobLog};
use tokio::net::TcpListener;
use tokio::sync::{mpsc, watch as signal};

use crate::{CliError, ServeArgs};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub http: SocketAddr,
    pub ingest: SocketAddr,
    pub watch_dir: PathBuf,
    pub store_dir: PathBuf,
}

impl ServeConfig {
    pub fn from_args(a: &ServeArgs) -> Result<Self, CliError> {
        let ip: IpAddr = a.bind.parse().map_err(|_| CliError::BadParams(format!("bad bind address {:?}", a.bind)))?;
        Ok(ServeConfig {
            http: SocketAddr::new(ip, a.http_port),
            ingest: SocketAddr::new(ip, a.ingest_port),
            watch_dir: a.watch_dir.clone(),
            store_dir: a.store_dir.clone(),
        })
    }
}

/// Runs until `shutdown` resolves, then flushes the store manifest. Bound
/// addresses are printed first so callers can use port 0.
pub async fn serve(cfg: ServeConfig, shutdown: impl Future<Output = ()>, out: &mut dyn Write) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.watch_dir)?;
    let store = Arc::new(DocumentStore::open(&cfg.store_dir).map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?);
    let http = TcpListener::bind(cfg.http).await.map_err(CliError::HttpBind)?;
    let ingest = IngestServer::bind(cfg.ingest, &cfg.watch_dir).await.map_err(CliError::IngestBind)?;
    writeln!(out, "http {}", http.local_addr()?)?;
    writeln!(out, "ingest {}", ingest.local_addr()?)?;
    out.flush()?;

    let (stop_tx, stop_rx) = signal::channel(false);
    let stopped = |mut rx: signal::Receiver<bool>| async move {
        let _ = rx.wait_for(|s| *s).await;
    };
    let watcher = Watcher::new(&cfg.watch_dir).map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    let (events_tx, events_rx) = mpsc::channel(64);
    let watch_task = tokio::spawn(watch(watcher, POLL_PERIOD, events_tx));
    let jobs = tokio::spawn(job_loop(events_rx, store.clone(), JobLog::default()));
    let ingest_task = tokio::spawn(ingest.run(stopped(stop_rx.clone())));
    let http_task = tokio::spawn(serve_http(http, AppState::new(store.clone()), stopped(stop_rx)));

    shutdown.await;
    log::info!("shutting down");
    let _ = stop_tx.send(true);
    watch_task.abort();
    let _ = ingest_task.await;
    let _ = http_task.await;
    let _ = jobs.await;
    store.flush().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(())
}
