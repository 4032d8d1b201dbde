//! The bundled 11-row bitmap font used to train the default atlas and to
//! render synthetic pages.

use std::sync::OnceLock;

use super::atlas::{build_atlas, TemplateAtlas};
use super::raster::RasterPage;
use super::OcrError;

const FONT_DATA: &str = include_str!("../../data/font11.txt");

/// Rows per glyph in the bundled font; also its em height in pixels.
pub const EM_ROWS: usize = 11;

/// A glyph drawn on the font's em box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitmapGlyph {
    pub ch: char,
    pub width: usize,
    /// `EM_ROWS` rows of `width` cells, row-major.
    pub ink: Vec<bool>,
}

impl BitmapGlyph {
    pub fn height(&self) -> usize {
        self.ink.len() / self.width
    }

    pub fn is_ink(&self, x: usize, y: usize) -> bool {
        self.ink[y * self.width + x]
    }

    /// The glyph on a page with `margin` paper pixels on every side.
    pub fn to_page(&self, margin: usize) -> RasterPage {
        let (w, h) = (self.width + 2 * margin, self.height() + 2 * margin);
        let mut page = RasterPage::filled(w, h, 255);
        for y in 0..self.height() {
            for x in 0..self.width {
                if self.is_ink(x, y) {
                    page.set(x + margin, y + margin, 0);
                }
            }
        }
        page
    }
}

/// Parses the text font format: `: <char>` headers, each followed by
/// `EM_ROWS` equal-width rows of `#` and `.`.
pub fn parse_font(data: &str) -> Result<Vec<BitmapGlyph>, OcrError> {
    let mut glyphs: Vec<BitmapGlyph> = Vec::new();
    let mut current: Option<(char, Vec<&str>)> = None;
    let finish = |cur: (char, Vec<&str>), out: &mut Vec<BitmapGlyph>| -> Result<(), OcrError> {
        let (ch, rows) = cur;
        if rows.len() != EM_ROWS {
            return Err(OcrError::BadFont(format!("glyph {ch:?} has {} rows", rows.len())));
        }
        let width = rows[0].len();
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(OcrError::BadFont(format!("glyph {ch:?} has ragged rows")));
        }
        let ink = rows.iter().flat_map(|r| r.bytes().map(|b| b == b'#')).collect();
        out.push(BitmapGlyph { ch, width, ink });
        Ok(())
    };
    for line in data.lines() {
        let line = line.trim_end();
        if let Some(rest) = line.strip_prefix(": ") {
            if let Some(cur) = current.take() {
                finish(cur, &mut glyphs)?;
            }
            let mut chars = rest.chars();
            let ch = chars.next().ok_or_else(|| OcrError::BadFont("empty glyph header".into()))?;
            if chars.next().is_some() {
                return Err(OcrError::BadFont(format!("header {rest:?} names more than one char")));
            }
            current = Some((ch, Vec::new()));
        } else if line.is_empty() || line.starts_with('#') && current.is_none() {
            continue;
        } else if let Some((_, rows)) = current.as_mut() {
            if !line.bytes().all(|b| b == b'#' || b == b'.') {
                return Err(OcrError::BadFont(format!("bad row {line:?}")));
            }
            rows.push(line);
        }
    }
    if let Some(cur) = current.take() {
        finish(cur, &mut glyphs)?;
    }
    Ok(glyphs)
}

pub fn bundled_glyphs() -> &'static [BitmapGlyph] {
    static GLYPHS: OnceLock<Vec<BitmapGlyph>> = OnceLock::new();
    GLYPHS.get_or_init(|| parse_font(FONT_DATA).expect("bundled font parses"))
}

/// Training samples for the bundled atlas: each glyph's em box with a
/// one-pixel paper margin.
pub fn bundled_samples() -> Vec<(char, Vec<RasterPage>)> {
    bundled_glyphs().iter().map(|g| (g.ch, vec![g.to_page(1)])).collect()
}

/// The default atlas trained on [`bundled_samples`].
pub fn bundled_atlas() -> &'static TemplateAtlas {
    static ATLAS: OnceLock<TemplateAtlas> = OnceLock::new();
    ATLAS.get_or_init(|| build_atlas(&bundled_samples()).expect("bundled font yields an unambiguous atlas"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocr::binarize::binarize_otsu;
    use crate::ocr::segment::{segment_glyphs, segment_lines};

    const CHARSET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789.,!?'\"()-:;";

    #[test]
    fn bundled_charset_is_complete() {
        let got: String = bundled_glyphs().iter().map(|g| g.ch).collect();
        assert_eq!(got, CHARSET);
    }

    #[test]
    fn glyphs_are_tight_horizontally() {
        for g in bundled_glyphs() {
            let col_has_ink = |x| (0..EM_ROWS).any(|y| g.is_ink(x, y));
            assert!(col_has_ink(0) && col_has_ink(g.width - 1), "{:?} has blank edge column", g.ch);
        }
    }

    #[test]
    fn every_glyph_segments_as_one_box() {
        for g in bundled_glyphs() {
            let (bin, _) = binarize_otsu(&g.to_page(2));
            let lines = segment_lines(&bin);
            // a lone glyph with a vertical gap (i, j, !, ?, :, ;) splits into
            // bands; rejoin them as the renderer's line would
            let band = crate::ocr::segment::LineBand {
                top: lines.first().unwrap().top,
                bottom: lines.last().unwrap().bottom,
            };
            assert_eq!(segment_glyphs(&bin, band).len(), 1, "{:?}", g.ch);
        }
    }

    #[test]
    fn atlas_is_well_separated() {
        let atlas = bundled_atlas();
        assert_eq!(atlas.len(), CHARSET.chars().count());
        let (a, b, d) = atlas.min_separation().unwrap();
        assert!(d >= 8, "templates {a:?} and {b:?} only {d} cells apart");
    }

    #[test]
    fn rejects_malformed_font() {
        assert!(parse_font(": A\n##\n").is_err());
        assert!(parse_font(": AB\n").is_err());
        let ragged = format!(": A\n{}#\n", "##\n".repeat(10));
        assert!(parse_font(&ragged).is_err());
    }
}
