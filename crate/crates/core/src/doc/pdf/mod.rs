//! A PDF subset reader: classic xref tables, FlateDecode, simple fonts with
//! Standard or WinAnsi encoding and optional one-byte `ToUnicode` maps.
//! Reading order is content-stream order.

pub mod content;
pub mod encoding;
pub mod file;
pub mod filter;
mod lexer;
pub mod object;
pub mod pages;
pub mod writer;

pub use content::{extract_page_text, FontMap, PageFont, TJ_SPACE_THRESHOLD};
pub use file::{parse_pdf, PdfObjectTable};
pub use filter::decode_stream;
pub use object::{Dict, ObjRef, Object, Stream};
pub use writer::{write_text_pdf, FixtureOptions, PdfBuilder};

use crate::doc::DocError;

/// Page texts of a PDF file.
pub fn pdf_text(bytes: &[u8]) -> Result<Vec<String>, DocError> {
    pages::pages_text(&parse_pdf(bytes)?)
}
