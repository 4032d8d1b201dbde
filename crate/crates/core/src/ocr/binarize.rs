use super::raster::RasterPage;

/// Ink mask produced by thresholding a [`RasterPage`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPage {
    width: usize,
    height: usize,
    ink: Vec<bool>,
}

impl BinaryPage {
    pub fn new(width: usize, height: usize, ink: Vec<bool>) -> Self {
        assert_eq!(ink.len(), width * height);
        Self { width, height, ink }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn is_ink(&self, x: usize, y: usize) -> bool {
        self.ink[y * self.width + x]
    }

    pub fn ink_count(&self) -> usize {
        self.ink.iter().filter(|&&i| i).count()
    }

    pub fn row_has_ink(&self, y: usize) -> bool {
        self.ink[y * self.width..(y + 1) * self.width].iter().any(|&i| i)
    }

    /// Renders the mask back to a two-level page (ink 0, paper 255).
    pub fn to_raster(&self) -> RasterPage {
        let pixels = self.ink.iter().map(|&i| if i { 0 } else { 255 }).collect();
        RasterPage::new(self.width, self.height, pixels).expect("dimensions already validated")
    }
}

/// Otsu threshold over the 256-bin histogram.
///
/// Returns the `t` in `0..=255` maximizing between-class variance when the
/// classes are `value < t` and `value >= t`; the smallest such `t` wins ties.
/// Uniform pages have zero variance everywhere and therefore get `t = 0`.
pub fn otsu_threshold(page: &RasterPage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in page.pixels() {
        hist[p as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();

    // Between-class variance scaled by total^2 is
    //   (sum_all * w0 - total * sum0)^2 / (w0 * w1)
    // and comparing two such fractions by cross-multiplication keeps the
    // search exact, which makes tie-breaking well defined.
    let mut best_t = 0u8;
    let mut best: (u128, u128) = (0, 1);
    let mut w0 = 0u64;
    let mut sum0 = 0u64;
    for t in 1..=255usize {
        w0 += hist[t - 1];
        sum0 += (t as u64 - 1) * hist[t - 1];
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let diff = (i128::from(sum_all) * i128::from(w0) - i128::from(total) * i128::from(sum0)).unsigned_abs();
        let num = diff * diff;
        let den = u128::from(w0) * u128::from(w1);
        // num/den > best.0/best.1  <=>  num*best.1 > best.0*den
        if wide_gt(num, best.1, best.0, den) {
            best = (num, den);
            best_t = t as u8;
        }
    }
    best_t
}

/// `a*b > c*d` without overflow on u128 operands.
fn wide_gt(a: u128, b: u128, c: u128, d: u128) -> bool {
    mul_wide(a, b) > mul_wide(c, d)
}

fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & mask);
    let (b_hi, b_lo) = (b >> 64, b & mask);
    let lo_lo = a_lo * b_lo;
    let hi_lo = a_hi * b_lo;
    let lo_hi = a_lo * b_hi;
    let hi_hi = a_hi * b_hi;
    let mid = (lo_lo >> 64) + (hi_lo & mask) + (lo_hi & mask);
    let lo = (lo_lo & mask) | (mid << 64);
    let hi = hi_hi + (hi_lo >> 64) + (lo_hi >> 64) + (mid >> 64);
    (hi, lo)
}

/// Thresholds the page with [`otsu_threshold`]. A pixel is ink iff its value
/// is strictly below the threshold.
pub fn binarize_otsu(page: &RasterPage) -> (BinaryPage, u8) {
    let t = otsu_threshold(page);
    let ink = page.pixels().iter().map(|&p| p < t).collect();
    (BinaryPage::new(page.width(), page.height(), ink), t)
}
