use std::fmt;

use super::binarize::BinaryPage;
use super::segment::GlyphBox;
use super::OcrError;

/// Side length of the normalized glyph grid.
pub const GRID: usize = 16;

/// Number of cells in a [`GlyphGrid`].
pub const GRID_CELLS: u32 = (GRID * GRID) as u32;

/// 16x16 binary glyph, one `u16` per row with bit `15 - x` holding column `x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GlyphGrid(pub [u16; GRID]);

impl GlyphGrid {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.0[y] >> (GRID - 1 - x) & 1 == 1
    }

    pub fn set(&mut self, x: usize, y: usize, ink: bool) {
        let bit = 1u16 << (GRID - 1 - x);
        if ink {
            self.0[y] |= bit;
        } else {
            self.0[y] &= !bit;
        }
    }

    pub fn flip(&mut self, x: usize, y: usize) {
        self.0[y] ^= 1u16 << (GRID - 1 - x);
    }

    pub fn hamming(&self, other: &GlyphGrid) -> u32 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    pub fn ink_count(&self) -> u32 {
        self.0.iter().map(|r| r.count_ones()).sum()
    }

    pub fn complement(&self) -> GlyphGrid {
        let mut rows = self.0;
        for r in rows.iter_mut() {
            *r = !*r;
        }
        GlyphGrid(rows)
    }

    /// Renders the grid as a 16x16 binary page.
    pub fn to_binary(&self) -> BinaryPage {
        let ink = (0..GRID).flat_map(|y| (0..GRID).map(move |x| (y, x))).map(|(y, x)| self.get(x, y)).collect();
        BinaryPage::new(GRID, GRID, ink)
    }
}

impl fmt::Debug for GlyphGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f)?;
        for y in 0..GRID {
            for x in 0..GRID {
                f.write_str(if self.get(x, y) { "#" } else { "." })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Crops the box to its tight ink bounds, area-resamples the crop to 16x16
/// coverage fractions and marks a cell as ink when coverage is at least 0.5.
pub fn normalize_glyph(page: &BinaryPage, bbox: GlyphBox) -> Result<GlyphGrid, OcrError> {
    if bbox.w == 0 || bbox.h == 0 {
        return Err(OcrError::EmptyGlyph);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in bbox.y..bbox.bottom().min(page.height()) {
        for x in bbox.x..bbox.right().min(page.width()) {
            if page.is_ink(x, y) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    if x0 == usize::MAX {
        return Err(OcrError::EmptyGlyph);
    }
    let (w, h) = (x1 + 1 - x0, y1 + 1 - y0);

    // Exact coverage: on a common axis a source pixel spans GRID units and a
    // cell spans `w` (or `h`) units, so each cell's ink area is an integer
    // and the cell area is w*h. Ink iff 2*area >= w*h.
    let xs = super::raster::axis_overlaps(w, GRID);
    let ys = super::raster::axis_overlaps(h, GRID);
    let mut grid = GlyphGrid::default();
    for (gy, row_w) in ys.iter().enumerate() {
        for (gx, col_w) in xs.iter().enumerate() {
            let mut area = 0u64;
            for &(sy, wy) in row_w {
                for &(sx, wx) in col_w {
                    if page.is_ink(x0 + sx, y0 + sy) {
                        area += wy * wx;
                    }
                }
            }
            if 2 * area >= (w * h) as u64 {
                grid.set(gx, gy, true);
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page_from_grid(g: &GlyphGrid, k: usize, pad: usize) -> BinaryPage {
        let side = GRID * k + 2 * pad;
        let mut ink = vec![false; side * side];
        for y in 0..GRID * k {
            for x in 0..GRID * k {
                ink[(y + pad) * side + x + pad] = g.get(x / k, y / k);
            }
        }
        BinaryPage::new(side, side, ink)
    }

    fn whole(page: &BinaryPage) -> GlyphBox {
        GlyphBox { x: 0, y: 0, w: page.width(), h: page.height() }
    }

    /// Brute force coverage on the k-times replicated grid: every output cell
    /// covers exactly a k x k block, so its coverage is a plain count.
    fn replicated_oracle(g: &GlyphGrid, k: usize) -> GlyphGrid {
        let big = page_from_grid(g, k, 0);
        let mut out = GlyphGrid::default();
        for cy in 0..GRID {
            for cx in 0..GRID {
                let mut count = 0;
                for y in cy * k..(cy + 1) * k {
                    for x in cx * k..(cx + 1) * k {
                        count += big.is_ink(x, y) as usize;
                    }
                }
                out.set(cx, cy, 2 * count >= k * k);
            }
        }
        out
    }

    fn sample_grid() -> GlyphGrid {
        // border-touching ring with a bar
        let mut g = GlyphGrid::default();
        for i in 0..GRID {
            g.set(i, 0, true);
            g.set(i, GRID - 1, true);
            g.set(0, i, true);
            g.set(GRID - 1, i, true);
            g.set(i, 7, i % 3 != 0);
        }
        g
    }

    #[test]
    fn sixteen_square_glyph_is_identity() {
        let g = sample_grid();
        let page = page_from_grid(&g, 1, 3);
        assert_eq!(normalize_glyph(&page, whole(&page)).unwrap(), g);
    }

    #[test]
    fn integer_replication_recovers_grid() {
        let g = sample_grid();
        for k in 2..=6 {
            let page = page_from_grid(&g, k, 2);
            let n = normalize_glyph(&page, whole(&page)).unwrap();
            assert_eq!(n, replicated_oracle(&g, k));
            assert_eq!(n, g, "k = {k}");
        }
    }

    #[test]
    fn all_ink_box_is_all_ink() {
        let page = BinaryPage::new(32, 32, vec![true; 1024]);
        let g = normalize_glyph(&page, whole(&page)).unwrap();
        assert_eq!(g.ink_count(), GRID_CELLS);
    }

    #[test]
    fn empty_box_is_an_error() {
        let page = BinaryPage::new(4, 4, vec![false; 16]);
        assert!(matches!(normalize_glyph(&page, whole(&page)), Err(OcrError::EmptyGlyph)));
        assert!(matches!(
            normalize_glyph(&page, GlyphBox { x: 0, y: 0, w: 0, h: 2 }),
            Err(OcrError::EmptyGlyph)
        ));
    }

    #[test]
    fn small_glyph_upscales_by_coverage() {
        // "#.#": cell x spans [3x, 3x+3) against source pixels of 16 units,
        // so cells 5 and 10 are only one third ink and fall to paper
        let page = BinaryPage::new(3, 1, vec![true, false, true]);
        let g = normalize_glyph(&page, whole(&page)).unwrap();
        for y in 0..GRID {
            for x in 0..GRID {
                assert_eq!(g.get(x, y), x <= 4 || x >= 11, "cell ({x},{y})");
            }
        }
    }
}
