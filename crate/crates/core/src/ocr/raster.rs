//! Grayscale raster pages and the loaders for the supported image formats.
//!
//! Binary (`P5`) and plain (`P2`) PGM with maxval 255 are always supported.
//! PNG is decoded through the same [`RasterPage::decode`] entry point and
//! converted to 8-bit luma.

use std::io::Write;
use std::path::Path;

use super::OcrError;

/// Row-major grayscale page. `0` is black ink and `255` is white paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterPage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl RasterPage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, OcrError> {
        if width == 0 || height == 0 {
            return Err(OcrError::BadImage("page dimensions must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(OcrError::BadImage(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// A page filled with one value.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "page dimensions must be positive");
        Self { width, height, pixels: vec![value; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    /// Decodes PGM (`P5`/`P2`) or PNG bytes.
    pub fn decode(bytes: &[u8]) -> Result<Self, OcrError> {
        if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
            parse_pgm(bytes)
        } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
            decode_png(bytes)
        } else {
            Err(OcrError::BadImage("unrecognized raster format".into()))
        }
    }

    /// True when the bytes carry a magic number this loader understands.
    pub fn sniff(bytes: &[u8]) -> bool {
        bytes.starts_with(b"P5") || bytes.starts_with(b"P2") || bytes.starts_with(&[0x89, b'P', b'N', b'G'])
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OcrError> {
        let bytes = std::fs::read(path.as_ref())?;
        Self::decode(&bytes)
    }

    /// Binary PGM encoding (`P5`, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn save_pgm(&self, path: impl AsRef<Path>) -> Result<(), OcrError> {
        let mut file = std::fs::File::create(path.as_ref())?;
        file.write_all(&self.to_pgm())?;
        Ok(())
    }

    /// Copies out a sub-rectangle. The rectangle must lie inside the page.
    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Self {
        assert!(x + w <= self.width && y + h <= self.height && w > 0 && h > 0);
        let mut pixels = Vec::with_capacity(w * h);
        for row in y..y + h {
            pixels.extend_from_slice(&self.pixels[row * self.width + x..row * self.width + x + w]);
        }
        Self { width: w, height: h, pixels }
    }

    /// Area-weighted resample to `new_width` x `new_height`. Each output pixel
    /// is the exact average of the source area it covers, computed in integer
    /// arithmetic and rounded half up.
    pub fn resample_area(&self, new_width: usize, new_height: usize) -> Self {
        assert!(new_width > 0 && new_height > 0);
        let xs = axis_overlaps(self.width, new_width);
        let ys = axis_overlaps(self.height, new_height);
        let denom = (self.width * self.height) as u64;
        let mut pixels = Vec::with_capacity(new_width * new_height);
        for ys_row in &ys {
            for xs_col in &xs {
                let mut acc = 0u64;
                for &(sy, wy) in ys_row {
                    let row = &self.pixels[sy * self.width..(sy + 1) * self.width];
                    for &(sx, wx) in xs_col {
                        acc += u64::from(row[sx]) * wy * wx;
                    }
                }
                pixels.push(((2 * acc + denom) / (2 * denom)) as u8);
            }
        }
        Self { width: new_width, height: new_height, pixels }
    }

    /// Nearest-neighbour upscale by an integer factor.
    pub fn replicate(&self, factor: usize) -> Self {
        assert!(factor > 0);
        let (w, h) = (self.width * factor, self.height * factor);
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                pixels.push(self.get(x / factor, y / factor));
            }
        }
        Self { width: w, height: h, pixels }
    }
}

/// For each destination index, the source indices it touches with their
/// overlap weights. Source pixel `s` spans `[s*dst, (s+1)*dst)` and
/// destination pixel `d` spans `[d*src, (d+1)*src)` on a common integer axis,
/// so every weight is an exact integer and each row of weights sums to `src`.
pub(crate) fn axis_overlaps(src: usize, dst: usize) -> Vec<Vec<(usize, u64)>> {
    (0..dst)
        .map(|d| {
            let lo = d * src;
            let hi = lo + src;
            let first = lo / dst;
            let last = (hi - 1) / dst;
            (first..=last)
                .filter_map(|s| {
                    let overlap = hi.min((s + 1) * dst).saturating_sub(lo.max(s * dst));
                    (overlap > 0).then_some((s, overlap as u64))
                })
                .collect()
        })
        .collect()
}

fn parse_pgm(bytes: &[u8]) -> Result<RasterPage, OcrError> {
    let binary = &bytes[..2] == b"P5";
    let mut pos = 2;
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        *slot = next_pgm_number(bytes, &mut pos)?;
    }
    let [width, height, maxval] = header;
    if maxval != 255 {
        return Err(OcrError::BadImage(format!("unsupported PGM maxval {maxval}")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| OcrError::BadImage("PGM dimensions overflow".into()))?;
    let pixels = if binary {
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(OcrError::BadImage("PGM header not terminated".into()));
        }
        pos += 1;
        let data = bytes
            .get(pos..pos + count)
            .ok_or_else(|| OcrError::BadImage("PGM raster truncated".into()))?;
        data.to_vec()
    } else {
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            let v = next_pgm_number(bytes, &mut pos)?;
            if v > 255 {
                return Err(OcrError::BadImage(format!("PGM sample {v} exceeds maxval")));
            }
            data.push(v as u8);
        }
        data
    };
    RasterPage::new(width, height, pixels)
}

fn next_pgm_number(bytes: &[u8], pos: &mut usize) -> Result<usize, OcrError> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(OcrError::BadImage("PGM header truncated".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err(OcrError::BadImage(format!("expected number at byte {start}")));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| OcrError::BadImage(format!("number too large at byte {start}")))
}

fn decode_png(bytes: &[u8]) -> Result<RasterPage, OcrError> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(|e| OcrError::BadImage(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| OcrError::BadImage("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| OcrError::BadImage(e.to_string()))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let data = &buf[..info.buffer_size()];
    let mut pixels = Vec::with_capacity(w * h);
    for px in data.chunks_exact(channels).take(w * h) {
        let luma = match channels {
            1 | 2 => px[0],
            _ => {
                let y = 299 * u32::from(px[0]) + 587 * u32::from(px[1]) + 114 * u32::from(px[2]);
                ((y + 500) / 1000) as u8
            }
        };
        // composite alpha over white paper
        let luma = if channels == 2 || channels == 4 {
            let a = u32::from(px[channels - 1]);
            ((u32::from(luma) * a + 255 * (255 - a) + 127) / 255) as u8
        } else {
            luma
        };
        pixels.push(luma);
    }
    RasterPage::new(w, h, pixels)
}
