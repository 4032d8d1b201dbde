//! Page-tree traversal and per-page font resources.

use std::collections::HashSet;

use super::content::{extract_page_text, FontMap, PageFont};
use super::encoding::{parse_to_unicode, BaseEncoding, FontEncoding};
use super::file::PdfObjectTable;
use super::filter::decode_stream;
use super::object::{Dict, ObjRef, Object};
use crate::doc::DocError;

const MAX_TREE_DEPTH: usize = 64;

pub struct Page<'a> {
    pub dict: &'a Dict,
    pub resources: Option<&'a Dict>,
}

/// Leaf pages in document order, with inherited `/Resources` applied.
pub fn pages(table: &PdfObjectTable) -> Result<Vec<Page<'_>>, DocError> {
    let root = table.root()?;
    let Some(tree) = root.get("Pages") else {
        return Err(DocError::malformed(0, "catalog lacks /Pages"));
    };
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    walk(table, tree, None, 0, &mut seen, &mut out)?;
    Ok(out)
}

fn walk<'a>(
    table: &'a PdfObjectTable,
    node: &'a Object,
    inherited: Option<&'a Dict>,
    depth: usize,
    seen: &mut HashSet<ObjRef>,
    out: &mut Vec<Page<'a>>,
) -> Result<(), DocError> {
    if depth > MAX_TREE_DEPTH {
        return Err(DocError::malformed(0, "page tree too deep"));
    }
    if let Some(r) = node.as_ref() {
        if !seen.insert(r) {
            return Err(DocError::malformed(table.xref_offsets.get(&r.num).copied().unwrap_or(0), "cycle in page tree"));
        }
    }
    let dict = table.resolve(node)?.as_dict().ok_or_else(|| DocError::malformed(0, "page tree node is not a dictionary"))?;
    let resources = match table.lookup(dict, "Resources")? {
        Some(r) => Some(r.as_dict().ok_or_else(|| DocError::malformed(0, "/Resources is not a dictionary"))?),
        None => inherited,
    };
    match table.lookup(dict, "Kids")? {
        Some(Object::Array(kids)) => {
            for kid in kids {
                walk(table, kid, resources, depth + 1, seen, out)?;
            }
        }
        Some(_) => return Err(DocError::malformed(0, "/Kids is not an array")),
        None => out.push(Page { dict, resources }),
    }
    Ok(())
}

/// Decoded content of a page; arrays of streams are joined with whitespace.
pub fn page_content(table: &PdfObjectTable, page: &Page<'_>) -> Result<Vec<u8>, DocError> {
    let mut data = Vec::new();
    match table.lookup(page.dict, "Contents")? {
        None => {}
        Some(Object::Stream(s)) => data = decode_stream(s)?,
        Some(Object::Array(parts)) => {
            for part in parts {
                match table.resolve(part)? {
                    Object::Stream(s) => {
                        data.extend_from_slice(&decode_stream(s)?);
                        data.push(b'\n');
                    }
                    _ => return Err(DocError::malformed(0, "/Contents entry is not a stream")),
                }
            }
        }
        Some(_) => return Err(DocError::malformed(0, "/Contents is not a stream")),
    }
    Ok(data)
}

pub fn page_fonts(table: &PdfObjectTable, page: &Page<'_>) -> Result<FontMap, DocError> {
    let mut fonts = FontMap::new();
    let Some(res) = page.resources else { return Ok(fonts) };
    let Some(font_dict) = table.lookup(res, "Font")?.and_then(Object::as_dict) else {
        return Ok(fonts);
    };
    for (name, font) in font_dict {
        let font = table.resolve(font)?.as_dict().ok_or_else(|| DocError::malformed(0, "font is not a dictionary"))?;
        fonts.insert(name.clone(), load_font(table, font)?);
    }
    Ok(fonts)
}

fn load_font(table: &PdfObjectTable, font: &Dict) -> Result<PageFont, DocError> {
    if table.lookup(font, "Subtype")?.and_then(Object::as_name) == Some("Type0") {
        return Ok(PageFont::Composite);
    }
    let to_unicode = match table.lookup(font, "ToUnicode")? {
        Some(Object::Stream(s)) => parse_to_unicode(&decode_stream(s)?)?,
        _ => Default::default(),
    };
    let base = match table.lookup(font, "Encoding")? {
        None => BaseEncoding::Standard,
        Some(Object::Name(n)) => encoding_by_name(n)?,
        Some(Object::Dict(d)) => {
            if d.contains_key("Differences") && to_unicode.is_empty() {
                return Err(DocError::UnsupportedFeature("encoding /Differences".into()));
            }
            match table.lookup(d, "BaseEncoding")?.and_then(Object::as_name) {
                Some(n) => encoding_by_name(n)?,
                None => BaseEncoding::Standard,
            }
        }
        Some(_) => return Err(DocError::malformed(0, "bad /Encoding")),
    };
    Ok(PageFont::Simple(FontEncoding { base, to_unicode }))
}

fn encoding_by_name(name: &str) -> Result<BaseEncoding, DocError> {
    BaseEncoding::from_name(name).ok_or_else(|| DocError::UnsupportedFeature(format!("encoding /{name}")))
}

/// Text of every page in document order.
pub fn pages_text(table: &PdfObjectTable) -> Result<Vec<String>, DocError> {
    pages(table)?
        .iter()
        .map(|p| extract_page_text(&page_content(table, p)?, &page_fonts(table, p)?))
        .collect()
}
