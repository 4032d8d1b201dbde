//! Scanner wire frame: `"OCRS" | version u8 | name_len u16 BE | name |
//! payload_len u32 BE | payload | crc32 u32 BE`, CRC over the payload only.

use thiserror::Error;
use tokio::io::{AsyncRead, AsyncReadExt};

pub const MAGIC: [u8; 4] = *b"OCRS";
pub const VERSION: u8 = 1;
pub const MAX_PAYLOAD: u64 = 64 * 1024 * 1024;
/// Bytes around the filename and payload.
pub const OVERHEAD: usize = 4 + 1 + 2 + 4 + 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestFrame {
    pub filename: String,
    pub payload: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("crc mismatch: frame says {expected:08x}, payload is {actual:08x}")]
    CrcMismatch { expected: u32, actual: u32 },
    #[error("invalid filename {0:?}")]
    InvalidFilename(String),
    #[error("stream ended inside a frame")]
    Truncated,
    #[error("payload of {0} bytes exceeds limit")]
    PayloadTooLarge(u64),
    #[error("storage failed: {0}")]
    Io(#[from] std::io::Error),
}

impl FrameError {
    /// Two-digit wire code.
    pub fn code(&self) -> u8 {
        match self {
            FrameError::BadMagic => 1,
            FrameError::BadVersion(_) => 2,
            FrameError::CrcMismatch { .. } => 3,
            FrameError::InvalidFilename(_) => 4,
            FrameError::Truncated => 5,
            FrameError::PayloadTooLarge(_) => 6,
            FrameError::Io(_) => 7,
        }
    }

    pub fn ack(&self) -> Vec<u8> {
        format!("ER{:02}\n", self.code()).into_bytes()
    }

    /// The stream position is unknown afterwards.
    pub fn closes_connection(&self) -> bool {
        matches!(self, FrameError::BadMagic | FrameError::Truncated)
    }
}

pub const ACK_OK: &[u8] = b"OK\n";

/// One plain path component. Leading dots are refused so clients cannot
/// collide with in-progress temp files or hide from the watcher.
pub fn validate_filename(name: &str) -> Result<(), FrameError> {
    let ok = !name.is_empty()
        && name.len() <= usize::from(u16::MAX)
        && !name.starts_with('.')
        && !name.chars().any(|c| matches!(c, '/' | '\\' | '\0') || c.is_control());
    if ok {
        Ok(())
    } else {
        Err(FrameError::InvalidFilename(name.to_string()))
    }
}

pub fn encode_frame(filename: &str, payload: &[u8]) -> Result<Vec<u8>, FrameError> {
    validate_filename(filename)?;
    if payload.len() as u64 > MAX_PAYLOAD {
        return Err(FrameError::PayloadTooLarge(payload.len() as u64));
    }
    let mut out = Vec::with_capacity(OVERHEAD + filename.len() + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(filename.len() as u16).to_be_bytes());
    out.extend_from_slice(filename.as_bytes());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&crc32fast::hash(payload).to_be_bytes());
    Ok(out)
}

/// Checks in wire order once every byte of the frame has been consumed.
fn check(version: u8, name: Vec<u8>, payload: Vec<u8>, crc: u32) -> Result<IngestFrame, FrameError> {
    if version != VERSION {
        return Err(FrameError::BadVersion(version));
    }
    let filename =
        String::from_utf8(name).map_err(|e| FrameError::InvalidFilename(String::from_utf8_lossy(e.as_bytes()).into()))?;
    validate_filename(&filename)?;
    let actual = crc32fast::hash(&payload);
    if actual != crc {
        return Err(FrameError::CrcMismatch { expected: crc, actual });
    }
    Ok(IngestFrame { filename, payload })
}

/// Decodes the frame at the start of `bytes`, returning it with its length.
pub fn decode_frame(bytes: &[u8]) -> Result<(IngestFrame, usize), FrameError> {
    let mut at = 0;
    let mut take = |n: usize| -> Result<&[u8], FrameError> {
        let s = bytes.get(at..at + n).ok_or(FrameError::Truncated)?;
        at += n;
        Ok(s)
    };
    if take(4)? != MAGIC {
        return Err(FrameError::BadMagic);
    }
    let version = take(1)?[0];
    let name_len = u16::from_be_bytes(take(2)?.try_into().expect("2 bytes"));
    let name = take(usize::from(name_len))?.to_vec();
    let len = u64::from(u32::from_be_bytes(take(4)?.try_into().expect("4 bytes")));
    if len > MAX_PAYLOAD {
        take(len as usize)?;
        take(4)?;
        return Err(FrameError::PayloadTooLarge(len));
    }
    let payload = take(len as usize)?.to_vec();
    let crc = u32::from_be_bytes(take(4)?.try_into().expect("4 bytes"));
    check(version, name, payload, crc).map(|f| (f, at))
}

async fn fill<R: AsyncRead + Unpin>(r: &mut R, buf: &mut [u8]) -> Result<(), FrameError> {
    match r.read_exact(buf).await {
        Ok(_) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Err(FrameError::Truncated),
        Err(e) => Err(e.into()),
    }
}

/// `Ok(None)` on a clean end of stream between frames. Frames with a
/// recoverable error are consumed whole so the next frame stays aligned.
pub async fn read_frame<R: AsyncRead + Unpin>(r: &mut R) -> Result<Option<IngestFrame>, FrameError> {
    let mut magic = [0u8; 4];
    let n = r.read(&mut magic).await?;
    if n == 0 {
        return Ok(None);
    }
    fill(r, &mut magic[n..]).await?;
    if magic != MAGIC {
        return Err(FrameError::BadMagic);
    }
    let mut head = [0u8; 3];
    fill(r, &mut head).await?;
    let mut name = vec![0u8; usize::from(u16::from_be_bytes([head[1], head[2]]))];
    fill(r, &mut name).await?;
    let mut len = [0u8; 4];
    fill(r, &mut len).await?;
    let len = u64::from(u32::from_be_bytes(len));
    if len > MAX_PAYLOAD {
        let skipped = tokio::io::copy(&mut r.take(len + 4), &mut tokio::io::sink()).await?;
        return Err(if skipped < len + 4 { FrameError::Truncated } else { FrameError::PayloadTooLarge(len) });
    }
    let mut payload = vec![0u8; len as usize];
    fill(r, &mut payload).await?;
    let mut crc = [0u8; 4];
    fill(r, &mut crc).await?;
    check(head[0], name, payload, u32::from_be_bytes(crc)).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(encode_frame("a.pdf", b"PD").unwrap().len(), 22);
        let f = encode_frame("x", b"").unwrap();
        assert_eq!(&f[f.len() - 4..], &[0, 0, 0, 0]);
        assert!(matches!(encode_frame("../e", b"z"), Err(FrameError::InvalidFilename(_))));
    }

    #[test]
    fn known_crc() {
        let f = encode_frame("a", b"123456789").unwrap();
        assert_eq!(&f[f.len() - 4..], &0xCBF4_3926u32.to_be_bytes());
    }

    #[test]
    fn filename_rules() {
        for bad in ["", "..", ".", "a/b", "a\\b", ".hidden", "x\0", "tab\there"] {
            assert!(validate_filename(bad).is_err(), "{bad:?}");
        }
        for good in ["a.txt", "scan 01.png", "é.pdf", "a..b"] {
            validate_filename(good).unwrap();
        }
    }

    #[test]
    fn decode_errors() {
        let good = encode_frame("a.txt", b"hi").unwrap();
        let (f, n) = decode_frame(&good).unwrap();
        assert_eq!((f.filename.as_str(), f.payload.as_slice(), n), ("a.txt", &b"hi"[..], good.len()));

        let mut x = good.clone();
        x[3] = b'X';
        assert!(matches!(decode_frame(&x), Err(FrameError::BadMagic)));
        let mut x = good.clone();
        x[4] = 2;
        assert!(matches!(decode_frame(&x), Err(FrameError::BadVersion(2))));
        let mut x = good.clone();
        x[16] ^= 1;
        assert!(matches!(decode_frame(&x), Err(FrameError::CrcMismatch { .. })));
        for cut in 0..good.len() {
            assert!(matches!(decode_frame(&good[..cut]), Err(FrameError::Truncated)), "{cut}");
        }
    }

    #[test]
    fn codes_are_distinct() {
        let errs = [
            FrameError::BadMagic,
            FrameError::BadVersion(9),
            FrameError::CrcMismatch { expected: 0, actual: 1 },
            FrameError::InvalidFilename(String::new()),
            FrameError::Truncated,
            FrameError::PayloadTooLarge(0),
        ];
        let acks: Vec<_> = errs.iter().map(|e| String::from_utf8(e.ack()).unwrap()).collect();
        assert_eq!(acks, ["ER01\n", "ER02\n", "ER03\n", "ER04\n", "ER05\n", "ER06\n"]);
    }

    #[tokio::test]
    async fn oversize_frame_is_skipped_and_stream_stays_aligned() {
        let mut s = Vec::new();
        s.extend_from_slice(&MAGIC);
        s.extend_from_slice(&[1, 0, 1, b'a']);
        s.extend_from_slice(&((MAX_PAYLOAD + 1) as u32).to_be_bytes());
        s.resize(s.len() + MAX_PAYLOAD as usize + 1 + 4, 7);
        s.extend(encode_frame("b", b"ok").unwrap());
        let mut r = s.as_slice();
        assert!(matches!(read_frame(&mut r).await, Err(FrameError::PayloadTooLarge(_))));
        assert_eq!(read_frame(&mut r).await.unwrap().unwrap().filename, "b");
        assert!(read_frame(&mut r).await.unwrap().is_none());
    }
}
