//! Document text extraction: PDF subset, UTF-8 passthrough, and raster pages
//! routed through template OCR.

pub mod pdf;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ocr::font::bundled_atlas;
use crate::ocr::{recognize_page, OcrError, RasterPage, TemplateAtlas};

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("input is empty")]
    EmptyInput,
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed document at byte {offset}: {reason}")]
    MalformedDocument { offset: usize, reason: String },
    #[error("document is encrypted")]
    EncryptedDocument,
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("unsupported stream filter: {0}")]
    UnsupportedFilter(String),
    #[error("corrupt stream: {0}")]
    CorruptStream(String),
    #[error(transparent)]
    Ocr(#[from] OcrError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DocError {
    pub fn malformed(offset: usize, reason: impl Into<String>) -> Self {
        DocError::MalformedDocument { offset, reason: reason.into() }
    }

    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            DocError::EmptyInput => "EmptyInput",
            DocError::UnsupportedFormat(_) => "UnsupportedFormat",
            DocError::MalformedDocument { .. } => "MalformedDocument",
            DocError::EncryptedDocument => "EncryptedDocument",
            DocError::UnsupportedFeature(_) => "UnsupportedFeature",
            DocError::UnsupportedFilter(_) => "UnsupportedFilter",
            DocError::CorruptStream(_) => "CorruptStream",
            DocError::Ocr(_) => "OcrError",
            DocError::Io(_) => "IoError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Pdf,
    PlainText,
    RasterPage,
}

impl SourceKind {
    /// Routing by lowercase file extension.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "pdf" => Some(SourceKind::Pdf),
            "txt" => Some(SourceKind::PlainText),
            "pgm" | "png" => Some(SourceKind::RasterPage),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(Self::from_extension)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentSource {
    pub kind: SourceKind,
    pub bytes: Vec<u8>,
    pub name: String,
}

impl DocumentSource {
    /// Checks the magic bytes the kind promises.
    pub fn new(kind: SourceKind, bytes: Vec<u8>, name: impl Into<String>) -> Result<Self, DocError> {
        if bytes.is_empty() {
            return Err(DocError::EmptyInput);
        }
        match kind {
            SourceKind::Pdf if !bytes.starts_with(b"%PDF-") => {
                return Err(DocError::UnsupportedFormat("missing %PDF- header".into()));
            }
            SourceKind::RasterPage if !RasterPage::sniff(&bytes) => {
                return Err(DocError::UnsupportedFormat("not a PGM or PNG image".into()));
            }
            _ => {}
        }
        Ok(DocumentSource { kind, bytes, name: name.into() })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DocError> {
        let path = path.as_ref();
        let kind = SourceKind::from_path(path)
            .ok_or_else(|| DocError::UnsupportedFormat(format!("unrecognized extension: {}", path.display())))?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        Self::new(kind, std::fs::read(path)?, name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractedDocument {
    pub pages: Vec<String>,
    pub source_kind: SourceKind,
    pub char_count: usize,
}

impl ExtractedDocument {
    pub fn new(pages: Vec<String>, source_kind: SourceKind) -> Self {
        let char_count = pages.iter().map(|p| p.chars().count()).sum();
        ExtractedDocument { pages, source_kind, char_count }
    }

    /// Pages joined by form feed, the same separator the saved-text format uses.
    pub fn text(&self) -> String {
        self.pages.join("\x0c")
    }
}

/// Extracts text, recognizing raster pages with the bundled atlas.
pub fn extract_text(source: &DocumentSource) -> Result<ExtractedDocument, DocError> {
    extract_text_with(source, bundled_atlas())
}

pub fn extract_text_with(source: &DocumentSource, atlas: &TemplateAtlas) -> Result<ExtractedDocument, DocError> {
    if source.bytes.is_empty() {
        return Err(DocError::EmptyInput);
    }
    let pages = match source.kind {
        SourceKind::PlainText => {
            let text = std::str::from_utf8(&source.bytes)
                .map_err(|e| DocError::malformed(e.valid_up_to(), "invalid UTF-8"))?;
            vec![text.to_string()]
        }
        SourceKind::Pdf => {
            let pages = pdf::pdf_text(&source.bytes)?;
            if pages.is_empty() {
                return Err(DocError::malformed(0, "document has no pages"));
            }
            pages
        }
        SourceKind::RasterPage => {
            let page = RasterPage::decode(&source.bytes)?;
            vec![recognize_page(&page, atlas).text()]
        }
    };
    Ok(ExtractedDocument::new(pages, source.kind))
}
