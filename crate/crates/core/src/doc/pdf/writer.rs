//! Minimal PDF writer used for fixtures and round-trip tests.

use std::io::Write;

use flate2::write::ZlibEncoder;
use flate2::Compression;

use super::encoding::BaseEncoding;

/// Assembles indirect objects and a classic xref table.
#[derive(Debug, Default)]
pub struct PdfBuilder {
    bodies: Vec<Vec<u8>>,
}

impl PdfBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number the next `add` will receive.
    pub fn next_num(&self) -> u32 {
        self.bodies.len() as u32 + 1
    }

    pub fn add(&mut self, body: impl Into<Vec<u8>>) -> u32 {
        self.bodies.push(body.into());
        self.bodies.len() as u32
    }

    /// Adds a stream object; `extra` is spliced into its dictionary.
    pub fn add_stream(&mut self, extra: &str, data: &[u8]) -> u32 {
        let mut body = format!("<< /Length {} {} >>\nstream\n", data.len(), extra).into_bytes();
        body.extend_from_slice(data);
        body.extend_from_slice(b"\nendstream");
        self.add(body)
    }

    pub fn finish(&self, root: u32) -> Vec<u8> {
        self.finish_with(&format!("/Root {root} 0 R"))
    }

    /// Serializes with `trailer_entries` placed after `/Size`.
    pub fn finish_with(&self, trailer_entries: &str) -> Vec<u8> {
        let mut out = b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n".to_vec();
        let mut offsets = Vec::with_capacity(self.bodies.len());
        for (i, body) in self.bodies.iter().enumerate() {
            offsets.push(out.len());
            out.extend_from_slice(format!("{} 0 obj\n", i + 1).as_bytes());
            out.extend_from_slice(body);
            out.extend_from_slice(b"\nendobj\n");
        }
        let xref = out.len();
        out.extend_from_slice(format!("xref\n0 {}\n0000000000 65535 f \n", self.bodies.len() + 1).as_bytes());
        for off in offsets {
            out.extend_from_slice(format!("{off:010} 00000 n \n").as_bytes());
        }
        out.extend_from_slice(
            format!("trailer\n<< /Size {} {} >>\nstartxref\n{}\n%%EOF\n", self.bodies.len() + 1, trailer_entries, xref)
                .as_bytes(),
        );
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixtureOptions {
    pub compress: bool,
    pub font_size: u32,
    pub leading: u32,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions { compress: false, font_size: 12, leading: 14 }
    }
}

/// One page per entry, one `Tj` per line, WinAnsi Helvetica. Characters
/// outside WinAnsi are written as `?`.
pub fn write_text_pdf(pages: &[&str], opts: &FixtureOptions) -> Vec<u8> {
    let mut b = PdfBuilder::new();
    let catalog = b.add("<< /Type /Catalog /Pages 2 0 R >>");
    let first_page = b.next_num() + 1;
    let kids: Vec<String> = (0..pages.len()).map(|i| format!("{} 0 R", first_page + 2 * i as u32)).collect();
    b.add(format!("<< /Type /Pages /Kids [{}] /Count {} >>", kids.join(" "), pages.len()));
    for text in pages {
        let page = b.next_num();
        b.add(format!(
            "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Contents {} 0 R \
             /Resources << /Font << /F1 << /Type /Font /Subtype /Type1 /BaseFont /Helvetica \
             /Encoding /WinAnsiEncoding >> >> >> >>",
            page + 1
        ));
        let content = text_content(text, opts);
        if opts.compress {
            let mut z = ZlibEncoder::new(Vec::new(), Compression::default());
            z.write_all(&content).expect("in-memory write");
            b.add_stream("/Filter /FlateDecode", &z.finish().expect("in-memory write"));
        } else {
            b.add_stream("", &content);
        }
    }
    b.finish(catalog)
}

fn text_content(text: &str, opts: &FixtureOptions) -> Vec<u8> {
    let mut c = format!("BT\n/F1 {} Tf\n72 720 Td\n", opts.font_size).into_bytes();
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            c.extend_from_slice(format!("0 -{} Td\n", opts.leading).as_bytes());
        }
        if !line.is_empty() {
            c.push(b'(');
            c.extend_from_slice(&escape(line));
            c.extend_from_slice(b") Tj\n");
        }
    }
    c.extend_from_slice(b"ET\n");
    c
}

fn escape(line: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(line.len());
    for ch in line.chars() {
        let code = (0x20..=0xffu8).find(|&b| BaseEncoding::WinAnsi.decode(b) == Some(ch)).unwrap_or(b'?');
        match code {
            b'(' | b')' | b'\\' => out.extend_from_slice(&[b'\\', code]),
            0x20..=0x7e => out.push(code),
            _ => out.extend_from_slice(format!("\\{code:03o}").as_bytes()),
        }
    }
    out
}
