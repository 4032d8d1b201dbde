//! Text-operator interpreter for decoded content streams.

use std::collections::HashMap;

use super::encoding::FontEncoding;
use super::lexer::{is_delim, is_white, Lexer, Token};
use super::object::Object;
use crate::doc::DocError;

/// TJ adjustments beyond this many thousandths of an em read as a word gap.
pub const TJ_SPACE_THRESHOLD: f64 = 200.0;

const MAX_OPERANDS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum PageFont {
    Simple(FontEncoding),
    /// Type0 fonts with multi-byte CMaps are outside the subset.
    Composite,
}

pub type FontMap = HashMap<String, PageFont>;

/// Interprets text operators only; all other operators are skipped.
/// Negative vertical line moves and `T*`, `'`, `"` emit a newline.
pub fn extract_page_text(content: &[u8], fonts: &FontMap) -> Result<String, DocError> {
    let default_font = FontEncoding::default();
    let mut font: &FontEncoding = &default_font;
    let mut out = String::new();
    let mut operands: Vec<Object> = Vec::new();
    let mut bt_at: Option<usize> = None;
    let mut line_y = 0.0f64;
    let mut lx = Lexer::new(content, 0);

    loop {
        lx.skip_ws();
        let at = lx.pos;
        let Some(tok) = lx.next()? else { break };
        let op = match tok {
            Token::Keyword(k) if !matches!(k, b"true" | b"false" | b"null") => k,
            tok => {
                if operands.len() >= MAX_OPERANDS {
                    return Err(DocError::malformed(at, "operand stack overflow"));
                }
                operands.push(lx.finish_object(tok, false, 0)?);
                continue;
            }
        };
        match op {
            b"BT" => {
                if bt_at.is_some() {
                    return Err(DocError::malformed(at, "BT inside text object"));
                }
                bt_at = Some(at);
                line_y = 0.0;
            }
            b"ET" => {
                if bt_at.take().is_none() {
                    return Err(DocError::malformed(at, "ET without BT"));
                }
            }
            b"Tf" => {
                if let Some(name) = operands.first().and_then(Object::as_name) {
                    font = match fonts.get(name) {
                        Some(PageFont::Simple(enc)) => enc,
                        Some(PageFont::Composite) => {
                            return Err(DocError::UnsupportedFeature(format!("composite font /{name}")));
                        }
                        None => &default_font,
                    };
                }
            }
            b"Td" | b"TD" => {
                let ty = operands.get(1).and_then(Object::as_number).unwrap_or(0.0);
                line_y += ty;
                if ty < 0.0 {
                    out.push('\n');
                }
            }
            b"Tm" => {
                if let Some(f) = operands.get(5).and_then(Object::as_number) {
                    if f < line_y {
                        out.push('\n');
                    }
                    line_y = f;
                }
            }
            b"T*" => out.push('\n'),
            b"Tj" => show(operands.last(), font, &mut out),
            b"'" | b"\"" => {
                out.push('\n');
                show(operands.last(), font, &mut out);
            }
            b"TJ" => {
                for item in operands.last().and_then(Object::as_array).unwrap_or(&[]) {
                    match item {
                        Object::String(s) => font.decode_into(s, &mut out),
                        n => {
                            if n.as_number().is_some_and(|v| v.abs() > TJ_SPACE_THRESHOLD) {
                                out.push(' ');
                            }
                        }
                    }
                }
            }
            b"BI" => skip_inline_image(&mut lx)?,
            _ => {}
        }
        operands.clear();
    }
    if let Some(at) = bt_at {
        return Err(DocError::malformed(at, "BT without ET"));
    }
    Ok(out)
}

fn show(operand: Option<&Object>, font: &FontEncoding, out: &mut String) {
    if let Some(Object::String(s)) = operand {
        font.decode_into(s, out);
    }
}

/// Skips `... ID <binary> EI`; the image dictionary has already begun.
fn skip_inline_image(lx: &mut Lexer<'_>) -> Result<(), DocError> {
    let start = lx.pos;
    loop {
        match lx.next()? {
            Some(Token::Keyword(b"ID")) => break,
            Some(_) => {}
            None => return Err(DocError::malformed(start, "inline image without ID")),
        }
    }
    let buf = lx.buf();
    let mut i = lx.pos + 1;
    while i + 2 <= buf.len() {
        let ends = |j: usize| j >= buf.len() || is_white(buf[j]) || is_delim(buf[j]);
        if &buf[i..i + 2] == b"EI" && is_white(buf[i - 1]) && ends(i + 2) {
            lx.pos = i + 2;
            return Ok(());
        }
        i += 1;
    }
    Err(DocError::malformed(start, "inline image without EI"))
}
