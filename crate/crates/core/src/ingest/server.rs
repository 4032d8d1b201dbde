use std::collections::HashMap;
use std::future::Future;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use tokio::io::{AsyncRead, AsyncWrite, AsyncWriteExt};
use tokio::net::TcpListener;

use super::frame::{read_frame, FrameError, IngestFrame, ACK_OK};

pub const DEFAULT_PORT: u16 = 5555;

/// Suffix of in-progress files; together with the leading dot the watcher
/// never reports them.
pub const PART_SUFFIX: &str = ".part";

pub fn temp_name(filename: &str) -> String {
    format!(".{filename}{PART_SUFFIX}")
}

/// Stores completed payloads; writes to one target name are serialized.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: PathBuf,
    locks: Arc<Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>>,
}

impl Sink {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Sink { dir: dir.into(), locks: Arc::default() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Temp file then rename, so the target only ever holds complete bytes.
    pub async fn store(&self, frame: &IngestFrame) -> std::io::Result<PathBuf> {
        let lock = self.locks.lock().expect("lock map").entry(frame.filename.clone()).or_default().clone();
        let _guard = lock.lock().await;
        let tmp = self.dir.join(temp_name(&frame.filename));
        let target = self.dir.join(&frame.filename);
        let result = async {
            let mut f = tokio::fs::File::create(&tmp).await?;
            f.write_all(&frame.payload).await?;
            f.sync_all().await?;
            drop(f);
            tokio::fs::rename(&tmp, &target).await
        }
        .await;
        if result.is_err() {
            let _ = tokio::fs::remove_file(&tmp).await;
        }
        result.map(|()| target)
    }
}

/// Serves frames until the peer closes or a fatal error. Returns the number
/// of files stored.
pub async fn handle_connection<S: AsyncRead + AsyncWrite + Unpin>(mut stream: S, sink: &Sink) -> usize {
    let mut stored = 0;
    loop {
        let result = match read_frame(&mut stream).await {
            Ok(None) => break,
            Ok(Some(frame)) => sink.store(&frame).await.map(|p| (frame, p)).map_err(FrameError::from),
            Err(e) => Err(e),
        };
        let (ack, close) = match &result {
            Ok((frame, path)) => {
                log::info!("stored {} ({} bytes) at {}", frame.filename, frame.payload.len(), path.display());
                stored += 1;
                (ACK_OK.to_vec(), false)
            }
            Err(e) => {
                log::warn!("rejected frame: {e}");
                (e.ack(), e.closes_connection())
            }
        };
        if stream.write_all(&ack).await.is_err() || stream.flush().await.is_err() || close {
            break;
        }
    }
    let _ = stream.shutdown().await;
    stored
}

#[derive(Debug)]
pub struct IngestServer {
    listener: TcpListener,
    sink: Sink,
}

impl IngestServer {
    pub async fn bind(addr: SocketAddr, watch_dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let watch_dir = watch_dir.into();
        if !watch_dir.is_dir() {
            return Err(std::io::Error::new(std::io::ErrorKind::NotFound, format!("{} is not a directory", watch_dir.display())));
        }
        Ok(IngestServer { listener: TcpListener::bind(addr).await?, sink: Sink::new(watch_dir) })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts until `shutdown` resolves; in-flight connections are detached.
    pub async fn run(self, shutdown: impl Future<Output = ()>) {
        tokio::pin!(shutdown);
        loop {
            tokio::select! {
                () = &mut shutdown => break,
                accepted = self.listener.accept() => match accepted {
                    Ok((stream, peer)) => {
                        let sink = self.sink.clone();
                        tokio::spawn(async move {
                            let n = handle_connection(stream, &sink).await;
                            log::debug!("{peer} closed after {n} files");
                        });
                    }
                    Err(e) => log::warn!("accept failed: {e}"),
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::frame::encode_frame;
    use tokio::io::AsyncReadExt;

    async fn exchange(input: Vec<u8>, sink: &Sink) -> String {
        let (mut client, server) = tokio::io::duplex(1 << 16);
        let sink = sink.clone();
        let task = tokio::spawn(async move { handle_connection(server, &sink).await });
        client.write_all(&input).await.unwrap();
        client.shutdown().await.unwrap();
        let mut out = String::new();
        client.read_to_string(&mut out).await.unwrap();
        task.await.unwrap();
        out
    }

    #[tokio::test]
    async fn valid_then_corrupt_then_valid() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(dir.path());
        let mut bad = encode_frame("bad.txt", b"xyz").unwrap();
        let n = bad.len();
        bad[n - 5] ^= 0xff;
        let mut input = encode_frame("a.txt", b"hi").unwrap();
        input.extend(bad);
        input.extend(encode_frame("b.txt", b"yo").unwrap());
        assert_eq!(exchange(input, &sink).await, "OK\nER03\nOK\n");
        assert_eq!(std::fs::read(dir.path().join("a.txt")).unwrap(), b"hi");
        assert!(!dir.path().join("bad.txt").exists());
        let mut names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert_eq!(names, ["a.txt", "b.txt"]);
    }

    #[tokio::test]
    async fn bad_magic_and_truncation_close() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(dir.path());
        let mut input = b"OCRX".to_vec();
        input.extend(encode_frame("a.txt", b"hi").unwrap());
        assert_eq!(exchange(input, &sink).await, "ER01\n");
        let f = encode_frame("a.txt", b"hi").unwrap();
        assert_eq!(exchange(f[..f.len() - 1].to_vec(), &sink).await, "ER05\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[tokio::test]
    async fn recoverable_errors_keep_connection() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(dir.path());
        let mut v2 = encode_frame("v.txt", b"1").unwrap();
        v2[4] = 2;
        let mut input = v2;
        let mut named = encode_frame("ok.txt", b"1").unwrap();
        named[7] = b'.';
        input.extend(named);
        input.extend(encode_frame("ok.txt", b"1").unwrap());
        assert_eq!(exchange(input, &sink).await, "ER02\nER04\nOK\n");
    }

    #[tokio::test]
    async fn resend_overwrites() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(dir.path());
        let mut input = encode_frame("a.txt", b"first").unwrap();
        input.extend(encode_frame("a.txt", b"second").unwrap());
        assert_eq!(exchange(input, &sink).await, "OK\nOK\n");
        assert_eq!(std::fs::read(dir.path().join("a.txt")).unwrap(), b"second");
    }
}
