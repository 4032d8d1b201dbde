//! Template atlases: one 16x16 binary template per character.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::binarize::binarize_otsu;
use super::normalize::{normalize_glyph, GlyphGrid, GRID, GRID_CELLS};
use super::raster::RasterPage;
use super::segment::GlyphBox;
use super::OcrError;

/// File name of the atlas manifest inside an atlas directory.
pub const MANIFEST: &str = "manifest.txt";

/// Reference ink extent of a character at the size it was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlyphMetrics {
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateAtlas {
    charset: Vec<char>,
    templates: Vec<GlyphGrid>,
    metrics: Vec<GlyphMetrics>,
}

impl TemplateAtlas {
    pub fn charset(&self) -> &[char] {
        &self.charset
    }

    pub fn templates(&self) -> &[GlyphGrid] {
        &self.templates
    }

    pub fn metrics(&self) -> &[GlyphMetrics] {
        &self.metrics
    }

    pub fn len(&self) -> usize {
        self.charset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charset.is_empty()
    }

    pub fn template(&self, c: char) -> Option<&GlyphGrid> {
        self.charset.iter().position(|&x| x == c).map(|i| &self.templates[i])
    }

    /// Stable identifier derived from the charset and template bits (FNV-1a).
    pub fn id(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |b: u8| {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        for (c, t) in self.charset.iter().zip(&self.templates) {
            for b in (*c as u32).to_be_bytes() {
                feed(b);
            }
            for row in t.0 {
                for b in row.to_be_bytes() {
                    feed(b);
                }
            }
        }
        format!("atlas-{h:016x}")
    }

    /// Smallest Hamming distance between any two templates, with the pair.
    pub fn min_separation(&self) -> Option<(char, char, u32)> {
        let mut best: Option<(char, char, u32)> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = self.templates[i].hamming(&self.templates[j]);
                if best.map_or(true, |b| d < b.2) {
                    best = Some((self.charset[i], self.charset[j], d));
                }
            }
        }
        best
    }

    /// Writes one binary PGM per training sample plus a manifest with one
    /// `U+XXXX <file>` line per sample.
    pub fn save_dir(samples: &[(char, Vec<RasterPage>)], dir: impl AsRef<Path>) -> Result<(), OcrError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut manifest = String::from("# codepoint file\n");
        for (c, pages) in samples {
            for (k, page) in pages.iter().enumerate() {
                let name = format!("u{:04x}_{k}.pgm", *c as u32);
                page.save_pgm(dir.join(&name))?;
                let _ = writeln!(manifest, "U+{:04X} {name}", *c as u32);
            }
        }
        std::fs::write(dir.join(MANIFEST), manifest)?;
        Ok(())
    }

    /// Loads the samples listed in a manifest and builds the atlas from them.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, OcrError> {
        build_atlas(&load_samples(dir)?)
    }
}

/// Reads an atlas directory into per-character sample groups, keeping the
/// order in which characters first appear in the manifest.
pub fn load_samples(dir: impl AsRef<Path>) -> Result<Vec<(char, Vec<RasterPage>)>, OcrError> {
    let dir = dir.as_ref();
    let text = std::fs::read_to_string(dir.join(MANIFEST))?;
    let mut groups: Vec<(char, Vec<RasterPage>)> = Vec::new();
    let mut index: HashMap<char, usize> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || OcrError::BadManifest(format!("line {}: {line:?}", lineno + 1));
        let (cp, file) = line.split_once(char::is_whitespace).ok_or_else(bad)?;
        let hex = cp.strip_prefix("U+").ok_or_else(bad)?;
        let c = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32).ok_or_else(bad)?;
        let file = file.trim();
        if file.contains('/') || file.contains('\\') || file == ".." {
            return Err(bad());
        }
        let page = RasterPage::load(dir.join(file))?;
        let slot = *index.entry(c).or_insert_with(|| {
            groups.push((c, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(page);
    }
    Ok(groups)
}

/// Normalizes every sample and takes the cell-wise majority per character.
/// Ties in the vote (even sample counts) resolve to paper.
pub fn build_atlas(samples: &[(char, Vec<RasterPage>)]) -> Result<TemplateAtlas, OcrError> {
    let mut seen = HashMap::new();
    let mut charset = Vec::with_capacity(samples.len());
    let mut templates = Vec::with_capacity(samples.len());
    let mut metrics = Vec::with_capacity(samples.len());
    for (c, pages) in samples {
        if seen.insert(*c, ()).is_some() {
            return Err(OcrError::DuplicateCharacter(*c));
        }
        if pages.is_empty() {
            return Err(OcrError::NoSamples(*c));
        }
        let mut votes = [[0usize; GRID]; GRID];
        let (mut wsum, mut hsum) = (0, 0);
        for page in pages {
            let (bin, _) = binarize_otsu(page);
            let whole = GlyphBox { x: 0, y: 0, w: bin.width(), h: bin.height() };
            let grid = normalize_glyph(&bin, whole).map_err(|_| OcrError::BlankSample(*c))?;
            for (y, row) in votes.iter_mut().enumerate() {
                for (x, v) in row.iter_mut().enumerate() {
                    *v += grid.get(x, y) as usize;
                }
            }
            let (w, h) = ink_extent(&bin);
            wsum += w;
            hsum += h;
        }
        let mut template = GlyphGrid::default();
        for (y, row) in votes.iter().enumerate() {
            for (x, &v) in row.iter().enumerate() {
                template.set(x, y, 2 * v > pages.len());
            }
        }
        charset.push(*c);
        templates.push(template);
        metrics.push(GlyphMetrics {
            width: (wsum + pages.len() / 2) / pages.len(),
            height: (hsum + pages.len() / 2) / pages.len(),
        });
    }
    for i in 0..templates.len() {
        for j in i + 1..templates.len() {
            if templates[i] == templates[j] {
                return Err(OcrError::AmbiguousAtlas(charset[i], charset[j]));
            }
        }
    }
    Ok(TemplateAtlas { charset, templates, metrics })
}

fn ink_extent(bin: &super::binarize::BinaryPage) -> (usize, usize) {
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..bin.height() {
        for x in 0..bin.width() {
            if bin.is_ink(x, y) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    (x1 + 1 - x0, y1 + 1 - y0)
}

/// Nearest template by Hamming distance; ties go to the earlier charset entry.
/// Confidence is `1 - d/256`.
pub fn match_glyph(grid: &GlyphGrid, atlas: &TemplateAtlas) -> (char, f64) {
    assert!(!atlas.is_empty(), "cannot match against an empty atlas");
    let mut best = (0usize, u32::MAX);
    for (i, t) in atlas.templates.iter().enumerate() {
        let d = grid.hamming(t);
        if d < best.1 {
            best = (i, d);
        }
    }
    (atlas.charset[best.0], 1.0 - f64::from(best.1) / f64::from(GRID_CELLS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page_of(rows: &[&str]) -> RasterPage {
        let w = rows[0].len();
        let px = rows.iter().flat_map(|r| r.bytes().map(|b| if b == b'#' { 0 } else { 255 })).collect();
        RasterPage::new(w, rows.len(), px).unwrap()
    }

    fn ring() -> RasterPage {
        page_of(&["####", "#..#", "#..#", "####"])
    }

    fn cross() -> RasterPage {
        page_of(&[".#.", "###", ".#."])
    }

    #[test]
    fn one_sample_is_its_normalization() {
        let atlas = build_atlas(&[('o', vec![ring()])]).unwrap();
        let (bin, _) = binarize_otsu(&ring());
        let expect = normalize_glyph(&bin, GlyphBox { x: 0, y: 0, w: 4, h: 4 }).unwrap();
        assert_eq!(atlas.template('o'), Some(&expect));
        assert_eq!(atlas.metrics()[0], GlyphMetrics { width: 4, height: 4 });
    }

    #[test]
    fn identical_samples_vote_to_same_template() {
        let one = build_atlas(&[('o', vec![ring()])]).unwrap();
        let three = build_atlas(&[('o', vec![ring(), ring(), ring()])]).unwrap();
        assert_eq!(one.templates(), three.templates());
    }

    #[test]
    fn identical_bitmaps_are_ambiguous() {
        let err = build_atlas(&[('o', vec![ring()]), ('0', vec![ring()])]).unwrap_err();
        assert!(matches!(err, OcrError::AmbiguousAtlas('o', '0')));
    }

    #[test]
    fn duplicate_and_empty_groups_rejected() {
        assert!(matches!(
            build_atlas(&[('o', vec![ring()]), ('o', vec![cross()])]),
            Err(OcrError::DuplicateCharacter('o'))
        ));
        assert!(matches!(build_atlas(&[('o', vec![])]), Err(OcrError::NoSamples('o'))));
    }

    #[test]
    fn self_match_and_complement() {
        let atlas = build_atlas(&[('o', vec![ring()]), ('+', vec![cross()])]).unwrap();
        for (c, t) in atlas.charset().iter().zip(atlas.templates()) {
            assert_eq!(match_glyph(t, &atlas), (*c, 1.0));
        }
        let t = *atlas.template('o').unwrap();
        let pair = TemplateAtlas {
            charset: vec!['c', 'C'],
            templates: vec![t, t.complement()],
            metrics: vec![GlyphMetrics { width: 16, height: 16 }; 2],
        };
        assert_eq!(match_glyph(&t.complement(), &pair), ('C', 1.0));
    }

    #[test]
    fn ties_prefer_charset_order() {
        let mut a = GlyphGrid::default();
        a.set(0, 0, true);
        let mut b = GlyphGrid::default();
        b.set(1, 0, true);
        let atlas = TemplateAtlas {
            charset: vec!['a', 'b'],
            templates: vec![a, b],
            metrics: vec![GlyphMetrics { width: 1, height: 1 }; 2],
        };
        // blank grid is distance 1 from both
        assert_eq!(match_glyph(&GlyphGrid::default(), &atlas).0, 'a');
    }

    #[test]
    fn directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let samples = vec![('o', vec![ring()]), ('+', vec![cross(), cross()])];
        TemplateAtlas::save_dir(&samples, dir.path()).unwrap();
        let loaded = TemplateAtlas::load_dir(dir.path()).unwrap();
        assert_eq!(loaded, build_atlas(&samples).unwrap());
        assert_eq!(loaded.id(), build_atlas(&samples).unwrap().id());
    }

    #[test]
    fn manifest_rejects_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(MANIFEST), "U+0041 ../x.pgm\n").unwrap();
        assert!(matches!(load_samples(dir.path()), Err(OcrError::BadManifest(_))));
    }
}
