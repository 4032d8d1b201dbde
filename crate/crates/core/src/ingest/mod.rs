//! Scanner ingest: a TCP listener storing framed files into a watch
//! directory, and a watcher turning completed files into pipeline jobs.

pub mod frame;
pub mod server;
pub mod watch;

pub use frame::{decode_frame, encode_frame, read_frame, FrameError, IngestFrame, MAX_PAYLOAD};
pub use server::{handle_connection, IngestServer, Sink, DEFAULT_PORT};
pub use watch::{watch, WatchError, WatchEvent, WatchKind, Watcher, POLL_PERIOD};
