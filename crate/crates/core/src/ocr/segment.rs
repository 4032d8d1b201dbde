//! Line and glyph segmentation on a binarized page.

use super::binarize::BinaryPage;

/// Fraction of the narrower extent two components must share horizontally
/// before they are treated as parts of one glyph (the dot of `i`, `j`, `;`).
pub const MERGE_OVERLAP: f64 = 0.5;

/// Inter-glyph gap, as a fraction of the line's median glyph width, above
/// which a word space is inferred.
pub const SPACE_GAP_RATIO: f64 = 0.35;

/// Inclusive range of page rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineBand {
    pub top: usize,
    pub bottom: usize,
}

/// Axis-aligned box in page pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct GlyphBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl GlyphBox {
    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    fn union(&self, other: &GlyphBox) -> GlyphBox {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        GlyphBox {
            x,
            y,
            w: self.right().max(other.right()) - x,
            h: self.bottom().max(other.bottom()) - y,
        }
    }

    fn overlaps_horizontally(&self, other: &GlyphBox, ratio: f64) -> bool {
        let shared = self.right().min(other.right()).saturating_sub(self.x.max(other.x));
        shared > 0 && shared as f64 >= ratio * self.w.min(other.w) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentedGlyph {
    pub bbox: GlyphBox,
    pub space_before: bool,
}

/// Maximal runs of rows that contain at least one ink pixel, top to bottom.
pub fn segment_lines(page: &BinaryPage) -> Vec<LineBand> {
    let mut lines = Vec::new();
    let mut start = None;
    for y in 0..page.height() {
        match (page.row_has_ink(y), start) {
            (true, None) => start = Some(y),
            (false, Some(top)) => {
                lines.push(LineBand { top, bottom: y - 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(top) = start {
        lines.push(LineBand { top, bottom: page.height() - 1 });
    }
    lines
}

/// Glyph boxes of one line using the default merge and space constants.
pub fn segment_glyphs(page: &BinaryPage, line: LineBand) -> Vec<SegmentedGlyph> {
    segment_glyphs_with(page, line, MERGE_OVERLAP, SPACE_GAP_RATIO)
}

/// 8-connected components inside the band, merged when their horizontal
/// extents overlap by at least `merge_overlap` of the narrower one, sorted by
/// left edge and flagged with `space_before` when the gap to the previous box
/// exceeds `space_ratio` times the median box width.
pub fn segment_glyphs_with(
    page: &BinaryPage,
    line: LineBand,
    merge_overlap: f64,
    space_ratio: f64,
) -> Vec<SegmentedGlyph> {
    let mut boxes = components(page, line);
    boxes.sort_by_key(|b| (b.x, b.y));

    // merging can widen a box into a new neighbour, so iterate to a fixpoint
    loop {
        let mut merged = false;
        let mut out: Vec<GlyphBox> = Vec::with_capacity(boxes.len());
        for b in boxes {
            if let Some(slot) = out.iter_mut().rev().find(|o| o.overlaps_horizontally(&b, merge_overlap)) {
                *slot = slot.union(&b);
                merged = true;
            } else {
                out.push(b);
            }
        }
        out.sort_by_key(|b| (b.x, b.y));
        boxes = out;
        if !merged {
            break;
        }
    }

    let median = median_width(&boxes);
    let mut glyphs = Vec::with_capacity(boxes.len());
    for (i, b) in boxes.iter().enumerate() {
        let space_before = i > 0 && {
            let gap = b.x.saturating_sub(boxes[i - 1].right());
            gap as f64 > space_ratio * median
        };
        glyphs.push(SegmentedGlyph { bbox: *b, space_before });
    }
    glyphs
}

fn median_width(boxes: &[GlyphBox]) -> f64 {
    if boxes.is_empty() {
        return 0.0;
    }
    let mut widths: Vec<usize> = boxes.iter().map(|b| b.w).collect();
    widths.sort_unstable();
    let n = widths.len();
    if n % 2 == 1 {
        widths[n / 2] as f64
    } else {
        (widths[n / 2 - 1] + widths[n / 2]) as f64 / 2.0
    }
}

/// Bounding boxes of the 8-connected ink components within a band.
fn components(page: &BinaryPage, line: LineBand) -> Vec<GlyphBox> {
    let w = page.width();
    let band_h = line.bottom + 1 - line.top;
    let mut seen = vec![false; w * band_h];
    let mut boxes = Vec::new();
    let mut stack = Vec::new();
    for y0 in 0..band_h {
        for x0 in 0..w {
            if seen[y0 * w + x0] || !page.is_ink(x0, line.top + y0) {
                continue;
            }
            seen[y0 * w + x0] = true;
            stack.push((x0, y0));
            let (mut min_x, mut max_x, mut min_y, mut max_y) = (x0, x0, y0, y0);
            while let Some((x, y)) = stack.pop() {
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
                for ny in y.saturating_sub(1)..=(y + 1).min(band_h - 1) {
                    for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                        let idx = ny * w + nx;
                        if !seen[idx] && page.is_ink(nx, line.top + ny) {
                            seen[idx] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            boxes.push(GlyphBox {
                x: min_x,
                y: line.top + min_y,
                w: max_x + 1 - min_x,
                h: max_y + 1 - min_y,
            });
        }
    }
    boxes
}
