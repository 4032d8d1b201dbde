//! Search-with-highlight, highlight segmentation, and the saved-text format.
//!
//! All offsets count Unicode scalar values.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Separates pages in saved text.
pub const PAGE_SEPARATOR: char = '\x0c';

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TextError {
    #[error("search query is empty")]
    EmptyQuery,
    #[error("span [{start}, {end}) is outside text of length {len}")]
    InvalidSpan { start: usize, end: usize, len: usize },
    #[error("spans [{0}, {1}) and [{2}, {3}) overlap")]
    OverlappingSpans(usize, usize, usize, usize),
    #[error("bad color {0:?}")]
    BadColor(String),
}

/// Serialized as `"#rrggbb"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Rgb(pub u8, pub u8, pub u8);

impl From<Rgb> for String {
    fn from(c: Rgb) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Rgb {
    type Error = TextError;

    fn try_from(s: String) -> Result<Self, TextError> {
        s.parse()
    }
}

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);
    pub const YELLOW: Rgb = Rgb(255, 255, 0);
    pub const RED: Rgb = Rgb(255, 0, 0);
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = TextError;

    /// Accepts `#rrggbb` or `rrggbb`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s.strip_prefix('#').unwrap_or(s);
        let bad = || TextError::BadColor(s.to_string());
        if hex.len() != 6 || !hex.is_ascii() {
            return Err(bad());
        }
        let c = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(Rgb(c(0)?, c(2)?, c(4)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightSpan {
    pub start: usize,
    pub end: usize,
    pub color: Rgb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayPrefs {
    pub text_color: Rgb,
    pub highlight_color: Rgb,
}

impl Default for DisplayPrefs {
    fn default() -> Self {
        DisplayPrefs { text_color: Rgb::BLACK, highlight_color: Rgb::YELLOW }
    }
}

/// Case folding that keeps one scalar per scalar, so offsets stay aligned.
fn fold(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Leftmost non-overlapping occurrences; after a match at `[i, i+m)` the
/// scan resumes at `i+m`.
pub fn search_text(text: &str, query: &str, case_sensitive: bool, color: Rgb) -> Result<Vec<HighlightSpan>, TextError> {
    let norm = |s: &str| -> Vec<char> {
        if case_sensitive {
            s.chars().collect()
        } else {
            s.chars().map(fold).collect()
        }
    };
    let needle = norm(query);
    if needle.is_empty() {
        return Err(TextError::EmptyQuery);
    }
    let hay = norm(text);
    let fail = kmp_failure(&needle);
    let mut spans = Vec::new();
    let mut k = 0;
    for (i, &c) in hay.iter().enumerate() {
        while k > 0 && needle[k] != c {
            k = fail[k - 1];
        }
        if needle[k] == c {
            k += 1;
        }
        if k == needle.len() {
            spans.push(HighlightSpan { start: i + 1 - k, end: i + 1, color });
            // restarting from zero enforces non-overlap
            k = 0;
        }
    }
    Ok(spans)
}

fn kmp_failure(p: &[char]) -> Vec<usize> {
    let mut f = vec![0; p.len()];
    let mut k = 0;
    for i in 1..p.len() {
        while k > 0 && p[i] != p[k] {
            k = f[k - 1];
        }
        if p[i] == p[k] {
            k += 1;
        }
        f[i] = k;
    }
    f
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub text: String,
    /// `None` for plain runs.
    pub color: Option<Rgb>,
}

impl Segment {
    pub fn plain(text: impl Into<String>) -> Self {
        Segment { text: text.into(), color: None }
    }

    pub fn highlighted(text: impl Into<String>, color: Rgb) -> Self {
        Segment { text: text.into(), color: Some(color) }
    }
}

/// Splits `text` into alternating plain and highlighted runs. Empty plain
/// runs are omitted; spans may be given in any order.
pub fn apply_highlights(text: &str, spans: &[HighlightSpan]) -> Result<Vec<Segment>, TextError> {
    let chars: Vec<char> = text.chars().collect();
    let mut sorted = spans.to_vec();
    sorted.sort_by_key(|s| (s.start, s.end));
    for s in &sorted {
        if s.start >= s.end || s.end > chars.len() {
            return Err(TextError::InvalidSpan { start: s.start, end: s.end, len: chars.len() });
        }
    }
    for w in sorted.windows(2) {
        if w[1].start < w[0].end {
            return Err(TextError::OverlappingSpans(w[0].start, w[0].end, w[1].start, w[1].end));
        }
    }
    let run = |a: usize, b: usize| chars[a..b].iter().collect::<String>();
    let mut out = Vec::with_capacity(sorted.len() * 2 + 1);
    let mut at = 0;
    for s in &sorted {
        if at < s.start {
            out.push(Segment::plain(run(at, s.start)));
        }
        out.push(Segment::highlighted(run(s.start, s.end), s.color));
        at = s.end;
    }
    if at < chars.len() {
        out.push(Segment::plain(run(at, chars.len())));
    }
    Ok(out)
}

/// Pages joined by form feed with a trailing newline always appended.
pub fn format_saved(pages: &[String]) -> String {
    let mut s = pages.join(&PAGE_SEPARATOR.to_string());
    s.push('\n');
    s
}

/// Inverse of [`format_saved`]: strips exactly one trailing newline.
pub fn parse_saved(saved: &str) -> Vec<String> {
    let body = saved.strip_suffix('\n').unwrap_or(saved);
    body.split(PAGE_SEPARATOR).map(str::to_string).collect()
}

/// Writes the saved-text form of `pages`, returning the byte count.
pub fn save_text(pages: &[String], path: impl AsRef<Path>) -> std::io::Result<usize> {
    let s = format_saved(pages);
    std::fs::write(path, &s)?;
    Ok(s.len())
}

pub fn read_saved(path: impl AsRef<Path>) -> std::io::Result<Vec<String>> {
    Ok(parse_saved(&std::fs::read_to_string(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn starts(text: &str, q: &str) -> Vec<(usize, usize)> {
        search_text(text, q, true, Rgb::YELLOW).unwrap().iter().map(|s| (s.start, s.end)).collect()
    }

    #[test]
    fn search_examples() {
        assert_eq!(starts("abab", "ab"), [(0, 2), (2, 4)]);
        assert_eq!(starts("aaa", "aa"), [(0, 2)]);
        assert_eq!(starts("aaaa", "aa"), [(0, 2), (2, 4)]);
        assert_eq!(starts("speech", "x"), []);
        assert_eq!(search_text("x", "", true, Rgb::RED), Err(TextError::EmptyQuery));
    }

    #[test]
    fn offsets_count_scalars() {
        assert_eq!(starts("héllo wörld", "wö"), [(6, 8)]);
    }

    #[test]
    fn case_insensitive() {
        let s = search_text("Speech SPEECH speech", "speech", false, Rgb::RED).unwrap();
        assert_eq!(s.len(), 3);
        assert!(starts("Speech", "speech").is_empty());
    }

    #[test]
    fn highlight_examples() {
        let red = Rgb::RED;
        assert_eq!(
            apply_highlights("abc", &[HighlightSpan { start: 1, end: 2, color: red }]).unwrap(),
            [Segment::plain("a"), Segment::highlighted("b", red), Segment::plain("c")]
        );
        assert_eq!(apply_highlights("abc", &[]).unwrap(), [Segment::plain("abc")]);
        let overlap = [HighlightSpan { start: 0, end: 2, color: red }, HighlightSpan { start: 1, end: 3, color: red }];
        assert!(matches!(apply_highlights("abc", &overlap), Err(TextError::OverlappingSpans(..))));
        let outside = [HighlightSpan { start: 2, end: 4, color: red }];
        assert!(matches!(apply_highlights("abc", &outside), Err(TextError::InvalidSpan { .. })));
    }

    #[test]
    fn saved_format() {
        assert_eq!(format_saved(&["Hi".into()]), "Hi\n");
        assert_eq!(format_saved(&["a".into(), "b".into()]), "a\x0cb\n");
        assert_eq!(parse_saved("a\x0cb\n"), ["a", "b"]);
        assert_eq!(parse_saved("x\n\n"), ["x\n"]);
    }

    #[test]
    fn save_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        let pages = vec!["Hi".to_string()];
        assert_eq!(save_text(&pages, &p).unwrap(), 3);
        assert_eq!(std::fs::read(&p).unwrap(), b"Hi\n");
        assert_eq!(read_saved(&p).unwrap(), pages);
        assert!(save_text(&pages, dir.path().join("missing/out.txt")).is_err());
    }

    #[test]
    fn colors_parse() {
        assert_eq!("#ff8000".parse::<Rgb>().unwrap(), Rgb(255, 128, 0));
        assert_eq!(Rgb(1, 2, 3).to_string(), "#010203");
        assert!("#ff80".parse::<Rgb>().is_err());
    }
}
