//! Synthetic page rendering from glyph samples, used as the ground-truth
//! generator for accuracy measurements.

use std::collections::HashMap;

use super::binarize::binarize_otsu;
use super::raster::RasterPage;
use super::OcrError;

/// Paper border around rendered text, in native pixels.
pub const MARGIN: usize = 4;
/// Gap between glyphs of one word, in native pixels.
pub const GLYPH_GAP: usize = 1;
/// Gap standing in for a space, in native pixels.
pub const WORD_GAP: usize = 5;
/// Blank rows between text lines, in native pixels.
pub const LINE_GAP: usize = 3;

/// Glyph bitmaps sharing one em height, ready for layout.
#[derive(Debug, Clone)]
pub struct GlyphSet {
    em: usize,
    glyphs: HashMap<char, (usize, Vec<bool>)>,
    charset: Vec<char>,
}

impl GlyphSet {
    /// Builds a set from atlas training samples (first sample per character).
    /// Blank columns are trimmed per glyph; blank rows are trimmed uniformly
    /// so relative baselines survive.
    pub fn from_samples(samples: &[(char, Vec<RasterPage>)]) -> Result<Self, OcrError> {
        let mut raw = Vec::new();
        let mut height = None;
        for (c, pages) in samples {
            let page = pages.first().ok_or(OcrError::NoSamples(*c))?;
            if *height.get_or_insert(page.height()) != page.height() {
                return Err(OcrError::BadFont("glyph samples differ in height".into()));
            }
            let (bin, _) = binarize_otsu(page);
            raw.push((*c, bin));
        }
        let height = height.ok_or_else(|| OcrError::BadFont("no glyph samples".into()))?;
        let rows_with_ink: Vec<usize> = (0..height)
            .filter(|&y| raw.iter().any(|(_, b)| b.row_has_ink(y)))
            .collect();
        let (top, bottom) = match (rows_with_ink.first(), rows_with_ink.last()) {
            (Some(&t), Some(&b)) => (t, b),
            _ => return Err(OcrError::BadFont("glyph samples are blank".into())),
        };
        let em = bottom + 1 - top;
        let mut glyphs = HashMap::new();
        let mut charset = Vec::new();
        for (c, bin) in raw {
            let cols: Vec<usize> = (0..bin.width()).filter(|&x| (0..bin.height()).any(|y| bin.is_ink(x, y))).collect();
            let (Some(&x0), Some(&x1)) = (cols.first(), cols.last()) else {
                return Err(OcrError::BlankSample(c));
            };
            let width = x1 + 1 - x0;
            let mut ink = Vec::with_capacity(width * em);
            for y in top..=bottom {
                for x in x0..=x1 {
                    ink.push(bin.is_ink(x, y));
                }
            }
            glyphs.insert(c, (width, ink));
            charset.push(c);
        }
        Ok(Self { em, glyphs, charset })
    }

    pub fn em(&self) -> usize {
        self.em
    }

    pub fn charset(&self) -> &[char] {
        &self.charset
    }

    /// Lays the text out at native size. Spaces become [`WORD_GAP`] and
    /// newlines start a new line; every other character must be in the set.
    pub fn render_native(&self, text: &str) -> Result<RasterPage, OcrError> {
        let layout = self.layout(text)?;
        let width = layout.iter().map(|l| l.width).max().unwrap_or(0) + 2 * MARGIN;
        let lines = layout.len().max(1);
        let height = lines * self.em + (lines - 1) * LINE_GAP + 2 * MARGIN;
        let mut page = RasterPage::filled(width, height, 255);
        for (i, line) in layout.iter().enumerate() {
            let y0 = MARGIN + i * (self.em + LINE_GAP);
            for &(x0, c) in &line.placed {
                let (w, ink) = &self.glyphs[&c];
                for y in 0..self.em {
                    for x in 0..*w {
                        if ink[y * w + x] {
                            page.set(MARGIN + x0 + x, y0 + y, 0);
                        }
                    }
                }
            }
        }
        Ok(page)
    }

    /// Renders at native size, then area-resamples the page so the em box
    /// is `glyph_px` pixels tall. Area resampling of the piecewise-constant
    /// native page equals pixel replication followed by box downsampling.
    pub fn render(&self, text: &str, glyph_px: usize) -> Result<RasterPage, OcrError> {
        let native = self.render_native(text)?;
        Ok(scale_page(&native, self.em, glyph_px))
    }

    fn layout(&self, text: &str) -> Result<Vec<LineLayout>, OcrError> {
        text.split('\n')
            .map(|line| {
                let mut placed = Vec::new();
                let mut x = 0;
                let mut pending_space = false;
                for c in line.chars() {
                    if c == ' ' {
                        pending_space = true;
                        continue;
                    }
                    let (w, _) = self.glyphs.get(&c).ok_or(OcrError::UnknownCharacter(c))?;
                    if !placed.is_empty() {
                        x += if pending_space { WORD_GAP } else { GLYPH_GAP };
                    }
                    pending_space = false;
                    placed.push((x, c));
                    x += w;
                }
                Ok(LineLayout { width: x, placed })
            })
            .collect()
    }
}

struct LineLayout {
    width: usize,
    placed: Vec<(usize, char)>,
}

/// Scales a page so that `from_em` rows become `to_em` rows.
pub fn scale_page(page: &RasterPage, from_em: usize, to_em: usize) -> RasterPage {
    if from_em == to_em {
        return page.clone();
    }
    let w = ((page.width() * to_em) as f64 / from_em as f64).round().max(1.0) as usize;
    let h = ((page.height() * to_em) as f64 / from_em as f64).round().max(1.0) as usize;
    page.resample_area(w, h)
}

/// Pixel height of the em box at `pt` points on a 96 DPI page.
pub fn pt_to_px(pt: u32) -> usize {
    ((f64::from(pt) * 96.0 / 72.0).round() as usize).max(1)
}

/// Deterministic random text over `charset`: words of 1 to 8 characters
/// separated by single spaces, wrapped at roughly `line_chars` characters,
/// exactly `total_chars` characters long excluding newlines.
pub fn random_text(charset: &[char], total_chars: usize, line_chars: usize, seed: u64) -> String {
    let mut rng = SplitMix64(seed);
    let pick = |rng: &mut SplitMix64| charset[(rng.next() % charset.len() as u64) as usize];
    let mut lines: Vec<String> = Vec::new();
    let mut line = String::new();
    let mut line_len = 0;
    let mut count = 0;
    while count < total_chars {
        let remaining = total_chars - count;
        let mut word_len = 1 + (rng.next() % 8) as usize;
        if line_len > 0 {
            if remaining == 1 {
                // no room for a separator and a word: lengthen the last word
                line.push(pick(&mut rng));
                count += 1;
                continue;
            }
            word_len = word_len.min(remaining - 1);
            if line_len + 1 + word_len > line_chars {
                lines.push(std::mem::take(&mut line));
                line_len = 0;
            } else {
                line.push(' ');
                line_len += 1;
                count += 1;
            }
        }
        word_len = word_len.min(total_chars - count);
        for _ in 0..word_len {
            line.push(pick(&mut rng));
        }
        line_len += word_len;
        count += word_len;
    }
    if !line.is_empty() {
        lines.push(line);
    }
    lines.join("\n")
}

/// Flips roughly `fraction` of the pixels inside each glyph's native box.
pub fn perturb_native(set: &GlyphSet, text: &str, fraction: f64, seed: u64) -> Result<RasterPage, OcrError> {
    let mut page = set.render_native(text)?;
    if fraction <= 0.0 {
        return Ok(page);
    }
    let mut rng = SplitMix64(seed ^ 0x5eed);
    for (i, line) in set.layout(text)?.iter().enumerate() {
        let y0 = MARGIN + i * (set.em + LINE_GAP);
        for &(x0, c) in &line.placed {
            let w = set.glyphs[&c].0;
            for y in 0..set.em {
                for x in 0..w {
                    if (rng.next() as f64 / u64::MAX as f64) < fraction {
                        let (px, py) = (MARGIN + x0 + x, y0 + y);
                        let v = page.get(px, py);
                        page.set(px, py, 255 - v);
                    }
                }
            }
        }
    }
    Ok(page)
}

/// Small deterministic generator so corpora are reproducible everywhere.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}
