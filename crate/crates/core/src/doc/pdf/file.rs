//! File structure: header, classic cross-reference tables with `/Prev`
//! chains, trailer, and indirect objects.

use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{Lexer, Token};
use super::object::{Dict, ObjRef, Object, Stream};
use crate::doc::DocError;

const MAX_REF_CHAIN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct PdfObjectTable {
    pub objects: BTreeMap<ObjRef, Object>,
    /// The newest trailer in the `/Prev` chain.
    pub trailer: Dict,
    /// In-use object number to byte offset of its `n g obj` header.
    pub xref_offsets: BTreeMap<u32, usize>,
}

#[derive(Clone, Copy)]
struct XrefEntry {
    offset: usize,
    gen: u16,
}

pub fn parse_pdf(bytes: &[u8]) -> Result<PdfObjectTable, DocError> {
    if !bytes.starts_with(b"%PDF-") {
        return Err(DocError::UnsupportedFormat("missing %PDF- header".into()));
    }
    let sx = rfind(bytes, b"startxref").ok_or_else(|| DocError::malformed(bytes.len(), "missing startxref"))?;
    let mut lx = Lexer::new(bytes, sx + b"startxref".len());
    let first = lx.expect_uint()?;

    let mut entries: BTreeMap<u32, Option<XrefEntry>> = BTreeMap::new();
    let mut trailer: Option<Dict> = None;
    let mut seen = BTreeSet::new();
    let mut next = Some(first);
    while let Some(off) = next.take() {
        let off = usize::try_from(off).ok().filter(|&o| o < bytes.len());
        let off = off.ok_or_else(|| DocError::malformed(sx, "xref offset out of range"))?;
        if !seen.insert(off) {
            return Err(DocError::malformed(off, "cyclic /Prev chain"));
        }
        let section = read_xref_section(bytes, off)?;
        for (num, e) in section.entries {
            // newer sections were read first and win
            entries.entry(num).or_insert(e);
        }
        if section.trailer.contains_key("Encrypt") {
            return Err(DocError::EncryptedDocument);
        }
        next = match section.trailer.get("Prev") {
            Some(Object::Int(p)) if *p >= 0 => Some(*p as u64),
            Some(_) => return Err(DocError::malformed(off, "bad /Prev")),
            None => None,
        };
        trailer.get_or_insert(section.trailer);
    }
    let trailer = trailer.unwrap_or_default();

    let size = match trailer.get("Size") {
        Some(Object::Int(s)) if *s >= 0 => u32::try_from(*s).unwrap_or(u32::MAX),
        _ => return Err(DocError::malformed(first as usize, "trailer lacks /Size")),
    };
    let in_use: BTreeMap<u32, XrefEntry> = entries
        .into_iter()
        .filter(|&(num, _)| num < size && num != 0)
        .filter_map(|(num, e)| e.map(|e| (num, e)))
        .collect();

    let mut objects = BTreeMap::new();
    for (&num, e) in &in_use {
        let obj = read_indirect(bytes, num, *e, &in_use)?;
        objects.insert(ObjRef { num, gen: e.gen }, obj);
    }
    let table = PdfObjectTable {
        objects,
        trailer,
        xref_offsets: in_use.iter().map(|(&n, e)| (n, e.offset)).collect(),
    };
    match table.trailer.get("Root") {
        Some(Object::Ref(r)) if table.objects.contains_key(r) => Ok(table),
        Some(Object::Ref(r)) => Err(DocError::malformed(first as usize, format!("/Root {r:?} does not resolve"))),
        _ => Err(DocError::malformed(first as usize, "trailer lacks /Root")),
    }
}

impl PdfObjectTable {
    pub fn get(&self, r: ObjRef) -> Option<&Object> {
        self.objects.get(&r)
    }

    /// Follows references until a direct object is reached.
    pub fn resolve<'a>(&'a self, mut obj: &'a Object) -> Result<&'a Object, DocError> {
        for _ in 0..MAX_REF_CHAIN {
            match obj {
                Object::Ref(r) => {
                    obj = self.get(*r).ok_or_else(|| DocError::malformed(self.offset_of(*r), format!("dangling reference {r:?}")))?;
                }
                direct => return Ok(direct),
            }
        }
        Err(DocError::malformed(0, "reference chain too long"))
    }

    /// Resolves `dict[key]`, treating an absent key as `None`.
    pub fn lookup<'a>(&'a self, dict: &'a Dict, key: &str) -> Result<Option<&'a Object>, DocError> {
        dict.get(key).map(|o| self.resolve(o)).transpose()
    }

    pub fn root(&self) -> Result<&Dict, DocError> {
        let root = self.lookup(&self.trailer, "Root")?;
        root.and_then(Object::as_dict).ok_or_else(|| DocError::malformed(0, "/Root is not a dictionary"))
    }

    fn offset_of(&self, r: ObjRef) -> usize {
        self.xref_offsets.get(&r.num).copied().unwrap_or(0)
    }
}

struct XrefSection {
    entries: Vec<(u32, Option<XrefEntry>)>,
    trailer: Dict,
}

fn read_xref_section(bytes: &[u8], off: usize) -> Result<XrefSection, DocError> {
    let mut lx = Lexer::new(bytes, off);
    match lx.next()? {
        Some(Token::Keyword(b"xref")) => {}
        Some(Token::Int(_)) => return Err(DocError::UnsupportedFeature("cross-reference streams".into())),
        _ => return Err(DocError::malformed(off, "expected xref")),
    }
    let mut entries = Vec::new();
    loop {
        let at = lx.pos;
        match lx.next()? {
            Some(Token::Keyword(b"trailer")) => break,
            Some(Token::Int(start)) if start >= 0 => {
                let count = lx.expect_uint()?;
                for i in 0..count {
                    let row = lx.pos;
                    let offset = lx.expect_uint()?;
                    let gen = lx.expect_uint()?;
                    let num = u32::try_from(start as u64 + i).map_err(|_| DocError::malformed(row, "object number overflow"))?;
                    let gen = u16::try_from(gen).map_err(|_| DocError::malformed(row, "generation overflow"))?;
                    let entry = match lx.next()? {
                        Some(Token::Keyword(b"n")) => {
                            let offset = usize::try_from(offset).map_err(|_| DocError::malformed(row, "offset overflow"))?;
                            Some(XrefEntry { offset, gen })
                        }
                        Some(Token::Keyword(b"f")) => None,
                        _ => return Err(DocError::malformed(row, "xref row type must be n or f")),
                    };
                    entries.push((num, entry));
                }
            }
            _ => return Err(DocError::malformed(at, "bad xref subsection header")),
        }
    }
    let at = lx.pos;
    let trailer = match lx.object(true)? {
        Object::Dict(d) => d,
        _ => return Err(DocError::malformed(at, "trailer is not a dictionary")),
    };
    Ok(XrefSection { entries, trailer })
}

fn read_indirect(bytes: &[u8], num: u32, e: XrefEntry, xref: &BTreeMap<u32, XrefEntry>) -> Result<Object, DocError> {
    if e.offset >= bytes.len() {
        return Err(DocError::malformed(e.offset, format!("object {num} offset past end of file")));
    }
    let mut lx = Lexer::new(bytes, e.offset);
    let n = lx.expect_uint()?;
    let g = lx.expect_uint()?;
    if n != u64::from(num) || g != u64::from(e.gen) {
        return Err(DocError::malformed(e.offset, format!("xref points at {n} {g} obj, expected {num} {}", e.gen)));
    }
    lx.expect_keyword(b"obj")?;
    let obj = lx.object(true)?;
    let at = lx.pos;
    let obj = match lx.next()? {
        Some(Token::Keyword(b"endobj")) => return Ok(obj),
        Some(Token::Keyword(b"stream")) => {
            let Object::Dict(dict) = obj else {
                return Err(DocError::malformed(at, "stream without dictionary"));
            };
            let data = read_stream_data(&mut lx, &dict, xref)?;
            Object::Stream(Stream { dict, data })
        }
        _ => return Err(DocError::malformed(at, "expected endobj")),
    };
    lx.expect_keyword(b"endobj")?;
    Ok(obj)
}

fn read_stream_data(lx: &mut Lexer<'_>, dict: &Dict, xref: &BTreeMap<u32, XrefEntry>) -> Result<Vec<u8>, DocError> {
    let buf = lx.buf();
    let mut start = lx.pos;
    // the keyword is followed by CRLF or LF, never CR alone
    if buf.get(start) == Some(&b'\r') && buf.get(start + 1) == Some(&b'\n') {
        start += 2;
    } else if buf.get(start) == Some(&b'\n') {
        start += 1;
    }
    let len = match dict.get("Length") {
        Some(Object::Int(l)) => *l,
        Some(Object::Ref(r)) => indirect_length(buf, *r, xref)?,
        _ => return Err(DocError::malformed(start, "stream lacks /Length")),
    };
    let end = usize::try_from(len)
        .ok()
        .and_then(|l| start.checked_add(l))
        .filter(|&end| end <= buf.len())
        .ok_or_else(|| DocError::malformed(start, "stream /Length runs past end of file"))?;
    lx.pos = end;
    let at = lx.pos;
    match lx.next()? {
        Some(Token::Keyword(b"endstream")) => Ok(buf[start..end].to_vec()),
        _ => Err(DocError::malformed(at, "stream data does not match /Length")),
    }
}

fn indirect_length(buf: &[u8], r: ObjRef, xref: &BTreeMap<u32, XrefEntry>) -> Result<i64, DocError> {
    let e = xref
        .get(&r.num)
        .filter(|e| e.gen == r.gen)
        .ok_or_else(|| DocError::malformed(0, format!("/Length {r:?} does not resolve")))?;
    let mut lx = Lexer::new(buf, e.offset);
    lx.expect_uint()?;
    lx.expect_uint()?;
    lx.expect_keyword(b"obj")?;
    match lx.object(false)? {
        Object::Int(l) => Ok(l),
        _ => Err(DocError::malformed(e.offset, "indirect /Length is not an integer")),
    }
}

fn rfind(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).rposition(|w| w == needle)
}
