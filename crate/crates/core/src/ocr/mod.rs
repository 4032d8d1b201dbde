//! Raster text recognition: Otsu binarization, projection-based line
//! segmentation, connected-component glyph segmentation, 16x16 size
//! normalization and Hamming-distance template matching.

pub mod atlas;
pub mod binarize;
pub mod corpus;
pub mod font;
pub mod normalize;
pub mod raster;
pub mod segment;

use serde::Serialize;

pub use atlas::{build_atlas, match_glyph, GlyphMetrics, TemplateAtlas};
pub use binarize::{binarize_otsu, BinaryPage};
pub use normalize::{normalize_glyph, GlyphGrid};
pub use raster::RasterPage;
pub use segment::{segment_glyphs, segment_lines, GlyphBox, LineBand, SegmentedGlyph};

#[derive(Debug, thiserror::Error)]
pub enum OcrError {
    #[error("glyph box contains no ink")]
    EmptyGlyph,
    #[error("character {0:?} listed more than once")]
    DuplicateCharacter(char),
    #[error("characters {0:?} and {1:?} normalize to identical templates")]
    AmbiguousAtlas(char, char),
    #[error("no samples for character {0:?}")]
    NoSamples(char),
    #[error("sample for character {0:?} has no ink")]
    BlankSample(char),
    #[error("character {0:?} is not in the glyph set")]
    UnknownCharacter(char),
    #[error("bad image: {0}")]
    BadImage(String),
    #[error("bad atlas manifest: {0}")]
    BadManifest(String),
    #[error("bad font data: {0}")]
    BadFont(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecognizedGlyph {
    pub character: char,
    pub confidence: f64,
    #[serde(rename = "box")]
    pub bbox: GlyphBox,
    pub space_before: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RecognizedLine {
    pub glyphs: Vec<RecognizedGlyph>,
}

impl RecognizedLine {
    pub fn text(&self) -> String {
        let mut s = String::with_capacity(self.glyphs.len() + 8);
        for g in &self.glyphs {
            if g.space_before {
                s.push(' ');
            }
            s.push(g.character);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RecognizedText {
    pub lines: Vec<RecognizedLine>,
}

impl RecognizedText {
    /// Lines top to bottom joined with `\n`.
    pub fn text(&self) -> String {
        self.lines.iter().map(RecognizedLine::text).collect::<Vec<_>>().join("\n")
    }

    pub fn glyphs(&self) -> impl Iterator<Item = &RecognizedGlyph> {
        self.lines.iter().flat_map(|l| l.glyphs.iter())
    }
}

/// Binarize, split into lines, split lines into glyphs, normalize each glyph
/// and match it against the atlas.
pub fn recognize_page(page: &RasterPage, atlas: &TemplateAtlas) -> RecognizedText {
    let (binary, _) = binarize_otsu(page);
    let mut lines = Vec::new();
    for band in segment_lines(&binary) {
        let mut glyphs = Vec::new();
        for seg in segment_glyphs(&binary, band) {
            // segments are built from ink components, so they always hold ink
            let Ok(grid) = normalize_glyph(&binary, seg.bbox) else { continue };
            let (character, confidence) = match_glyph(&grid, atlas);
            glyphs.push(RecognizedGlyph { character, confidence, bbox: seg.bbox, space_before: seg.space_before });
        }
        if !glyphs.is_empty() {
            lines.push(RecognizedLine { glyphs });
        }
    }
    RecognizedText { lines }
}

#[cfg(test)]
mod tests {
    use super::corpus::{pt_to_px, GlyphSet};
    use super::font::{bundled_atlas, bundled_samples};
    use super::*;

    fn glyph_set() -> GlyphSet {
        GlyphSet::from_samples(&bundled_samples()).unwrap()
    }

    #[test]
    fn blank_page_is_empty_text() {
        let r = recognize_page(&RasterPage::filled(40, 30, 255), bundled_atlas());
        assert!(r.lines.is_empty());
        assert_eq!(r.text(), "");
    }

    #[test]
    fn hello_world_at_training_size() {
        let page = glyph_set().render_native("HELLO WORLD").unwrap();
        let r = recognize_page(&page, bundled_atlas());
        assert_eq!(r.text(), "HELLO WORLD");
        assert!(r.glyphs().all(|g| g.confidence == 1.0));
    }

    #[test]
    fn hello_world_at_8pt() {
        let page = glyph_set().render("HELLO WORLD", pt_to_px(8)).unwrap();
        assert_eq!(recognize_page(&page, bundled_atlas()).text(), "HELLO WORLD");
    }

    #[test]
    fn self_recognition_of_every_character() {
        let set = glyph_set();
        for &c in set.charset() {
            // pair with a full-height glyph so dotted characters stay one band
            let text = format!("H{c}");
            let r = recognize_page(&set.render_native(&text).unwrap(), bundled_atlas());
            assert_eq!(r.text(), text);
            assert_eq!(r.lines[0].glyphs[1].confidence, 1.0, "{c:?}");
        }
    }

    #[test]
    fn integer_upscales_recognize_exactly() {
        let set = glyph_set();
        let text = "The quick (brown) fox; jumps: over 13 lazy dogs! Why? \"Yes\", it's j-i.";
        let native = set.render_native(text).unwrap();
        for k in 2..=6 {
            let r = recognize_page(&native.replicate(k), bundled_atlas());
            assert_eq!(r.text(), text, "k = {k}");
            assert!(r.glyphs().all(|g| g.confidence == 1.0));
        }
    }

    #[test]
    fn boxes_lie_inside_page_and_are_sorted() {
        let page = glyph_set().render("Boxes stay in bounds, yes.\nSecond line", 32).unwrap();
        let r = recognize_page(&page, bundled_atlas());
        assert_eq!(r.lines.len(), 2);
        for line in &r.lines {
            assert!(line.glyphs.windows(2).all(|w| w[0].bbox.x < w[1].bbox.x));
            for g in &line.glyphs {
                assert!(g.bbox.right() <= page.width() && g.bbox.bottom() <= page.height());
                assert!((0.0..=1.0).contains(&g.confidence));
            }
        }
    }
}
