//! Polling directory watcher. A file is reported when it first appears under
//! a reportable name or when its (mtime, length) changes.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime};

use serde::Serialize;
use tokio::sync::mpsc;

use super::server::PART_SUFFIX;

pub const POLL_PERIOD: Duration = Duration::from_millis(250);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WatchKind {
    Created,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WatchEvent {
    pub path: PathBuf,
    pub kind: WatchKind,
    pub timestamp: SystemTime,
}

#[derive(Debug, thiserror::Error)]
pub enum WatchError {
    #[error("watch directory {0} does not exist")]
    WatchDirMissing(PathBuf),
    #[error("scanning watch directory: {0}")]
    Io(#[from] std::io::Error),
}

fn reportable(name: &str) -> bool {
    !name.starts_with('.') && !name.ends_with(PART_SUFFIX)
}

#[derive(Debug)]
pub struct Watcher {
    dir: PathBuf,
    seen: HashMap<PathBuf, (SystemTime, u64)>,
}

impl Watcher {
    /// Files already present are reported by the first poll.
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, WatchError> {
        let dir = dir.into();
        if !dir.is_dir() {
            return Err(WatchError::WatchDirMissing(dir));
        }
        Ok(Watcher { dir, seen: HashMap::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// New or changed files, sorted by path.
    pub fn poll(&mut self) -> Result<Vec<WatchEvent>, WatchError> {
        if !self.dir.is_dir() {
            return Err(WatchError::WatchDirMissing(self.dir.clone()));
        }
        let mut present = HashMap::new();
        for entry in std::fs::read_dir(&self.dir)? {
            let Ok(entry) = entry else { continue };
            let name = entry.file_name();
            if !name.to_str().is_some_and(reportable) {
                continue;
            }
            let Ok(meta) = entry.metadata() else { continue };
            if meta.is_file() {
                let mtime = meta.modified().unwrap_or(SystemTime::UNIX_EPOCH);
                present.insert(entry.path(), (mtime, meta.len()));
            }
        }
        let now = SystemTime::now();
        let mut events: Vec<WatchEvent> = present
            .iter()
            .filter(|(p, stamp)| self.seen.get(*p) != Some(stamp))
            .map(|(p, _)| WatchEvent { path: p.clone(), kind: WatchKind::Created, timestamp: now })
            .collect();
        events.sort_by(|a, b| a.path.cmp(&b.path));
        self.seen = present;
        Ok(events)
    }
}

/// Polls every `period` and forwards events until the receiver is dropped.
pub async fn watch(mut watcher: Watcher, period: Duration, tx: mpsc::Sender<WatchEvent>) {
    let mut tick = tokio::time::interval(period);
    tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        tick.tick().await;
        match watcher.poll() {
            Ok(events) => {
                for e in events {
                    if tx.send(e).await.is_err() {
                        return;
                    }
                }
            }
            Err(e) => log::warn!("{e}"),
        }
        if tx.is_closed() {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_dir() {
        assert!(matches!(Watcher::new("/nonexistent/lectern"), Err(WatchError::WatchDirMissing(_))));
    }

    #[test]
    fn rename_in_is_one_event() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = Watcher::new(dir.path()).unwrap();
        assert!(w.poll().unwrap().is_empty());
        std::fs::write(dir.path().join(".a.txt.part"), b"x").unwrap();
        assert!(w.poll().unwrap().is_empty());
        std::fs::rename(dir.path().join(".a.txt.part"), dir.path().join("a.txt")).unwrap();
        let ev = w.poll().unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].path, dir.path().join("a.txt"));
        assert!(w.poll().unwrap().is_empty());
    }

    #[test]
    fn abandoned_temp_is_silent() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = Watcher::new(dir.path()).unwrap();
        std::fs::write(dir.path().join(".b.part"), b"x").unwrap();
        assert!(w.poll().unwrap().is_empty());
        std::fs::remove_file(dir.path().join(".b.part")).unwrap();
        assert!(w.poll().unwrap().is_empty());
    }

    #[test]
    fn ten_files_ten_events() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = Watcher::new(dir.path()).unwrap();
        let mut want: Vec<PathBuf> = (0..10).map(|i| dir.path().join(format!("f{i}.txt"))).collect();
        for p in &want {
            std::fs::write(p, b"x").unwrap();
        }
        let got: Vec<PathBuf> = w.poll().unwrap().into_iter().map(|e| e.path).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[tokio::test]
    async fn async_watch_forwards() {
        let dir = tempfile::tempdir().unwrap();
        let (tx, mut rx) = mpsc::channel(4);
        tokio::spawn(watch(Watcher::new(dir.path()).unwrap(), Duration::from_millis(20), tx));
        std::fs::write(dir.path().join("x.pdf"), b"%PDF").unwrap();
        let e = tokio::time::timeout(Duration::from_secs(5), rx.recv()).await.unwrap().unwrap();
        assert_eq!(e.path, dir.path().join("x.pdf"));
        assert_eq!(e.kind, WatchKind::Created);
    }
}
