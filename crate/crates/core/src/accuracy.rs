//! Font-size accuracy benchmark: render a seeded random corpus at several
//! glyph heights, recognize it, and score per-character accuracy.

use std::fmt::Write as _;

use serde::Serialize;

use crate::ocr::corpus::{perturb_native, pt_to_px, random_text, scale_page, GlyphSet};
use crate::ocr::{build_atlas, recognize_page, OcrError, RasterPage};

/// Point sizes reported by default, in table order.
pub const DEFAULT_SIZES_PT: [u32; 5] = [8, 24, 36, 48, 72];

/// Accuracy at or above which a size is marked compatible.
pub const DEFAULT_THRESHOLD: f64 = 0.99;

/// Characters per corpus line.
pub const LINE_CHARS: usize = 60;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes_pt: Vec<u32>,
    pub chars: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Fraction of glyph pixels flipped before scaling.
    pub perturb: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes_pt: DEFAULT_SIZES_PT.to_vec(),
            chars: 1000,
            seed: 42,
            threshold: DEFAULT_THRESHOLD,
            perturb: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeResult {
    pub size_pt: u32,
    pub glyph_px: usize,
    pub chars_total: usize,
    pub chars_correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub atlas_id: String,
    pub threshold: f64,
    pub perturb: f64,
    pub sizes: Vec<SizeResult>,
}

impl BenchReport {
    /// `size_pt,chars,correct,accuracy` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size_pt,chars,correct,accuracy\n");
        for r in &self.sizes {
            let _ = writeln!(out, "{},{},{},{:.6}", r.size_pt, r.chars_total, r.chars_correct, r.accuracy);
        }
        out
    }

    pub fn passes(&self, r: &SizeResult) -> bool {
        r.accuracy >= self.threshold
    }

    /// Human-readable compatibility grid; the fixed rows below the measured
    /// one are reference systems.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "atlas {}  seed {}  threshold {:.3}  perturb {:.3}", self.atlas_id, self.seed, self.threshold, self.perturb);
        let _ = write!(out, "{:<44}", "");
        for r in &self.sizes {
            let _ = write!(out, "{:>8}", format!("{}pt", r.size_pt));
        }
        out.push('\n');
        let _ = write!(out, "{:<44}", "lectern (measured)");
        for r in &self.sizes {
            let _ = write!(out, "{:>8}", if self.passes(r) { "✓" } else { "✗" });
        }
        out.push('\n');
        let _ = write!(out, "{:<44}", "  accuracy");
        for r in &self.sizes {
            let _ = write!(out, "{:>8.4}", r.accuracy);
        }
        out.push('\n');
        for (label, from_pt) in [
            ("reference: OCR speech system", 0u32),
            ("reference: electronic reading aid", 36),
            ("reference: older versions", 48),
        ] {
            let _ = write!(out, "{label:<44}");
            for r in &self.sizes {
                let _ = write!(out, "{:>8}", if r.size_pt >= from_pt { "✓" } else { "✗" });
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the benchmark against glyph samples (the same samples train the
/// atlas that does the recognizing).
pub fn run_bench(samples: &[(char, Vec<RasterPage>)], config: &BenchConfig) -> Result<BenchReport, OcrError> {
    let atlas = build_atlas(samples)?;
    let set = GlyphSet::from_samples(samples)?;
    let mut sizes = Vec::with_capacity(config.sizes_pt.len());
    for &pt in &config.sizes_pt {
        let glyph_px = pt_to_px(pt);
        let seed = config.seed.wrapping_add(u64::from(pt).wrapping_mul(0x9e37_79b9));
        let truth = random_text(set.charset(), config.chars, LINE_CHARS, seed);
        let native = perturb_native(&set, &truth, config.perturb, seed)?;
        let page = scale_page(&native, set.em(), glyph_px);
        let recognized = recognize_page(&page, &atlas).text();
        let (chars_total, chars_correct) = score(&truth, &recognized);
        sizes.push(SizeResult {
            size_pt: pt,
            glyph_px,
            chars_total,
            chars_correct,
            accuracy: if chars_total == 0 { 1.0 } else { chars_correct as f64 / chars_total as f64 },
        });
    }
    Ok(BenchReport { seed: config.seed, atlas_id: atlas.id(), threshold: config.threshold, perturb: config.perturb, sizes })
}

/// Per-character score of `got` against `truth`, line by line: each line
/// contributes its length minus its edit distance (floored at zero). Missing
/// lines score zero; extra lines are ignored beyond the truth's line count.
pub fn score(truth: &str, got: &str) -> (usize, usize) {
    let got_lines: Vec<&str> = got.split('\n').collect();
    let mut total = 0;
    let mut correct = 0;
    for (i, line) in truth.split('\n').enumerate() {
        let t: Vec<char> = line.chars().collect();
        total += t.len();
        if let Some(g) = got_lines.get(i) {
            let g: Vec<char> = g.chars().collect();
            correct += t.len().saturating_sub(levenshtein(&t, &g));
        }
    }
    (total, correct)
}

fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
