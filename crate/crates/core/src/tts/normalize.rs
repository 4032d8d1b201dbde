//! Sentence splitting and text normalization into word and pause tokens.

use super::numbers::{digit_word, number_words};

/// Expansions are matched case-insensitively at a token start and must not be
/// followed by a letter.
pub const ABBREVIATIONS: &[(&str, &str)] = &[
    ("dr.", "doctor"),
    ("mr.", "mister"),
    ("mrs.", "missus"),
    ("ms.", "miz"),
    ("prof.", "professor"),
    ("st.", "saint"),
    ("jr.", "junior"),
    ("sr.", "senior"),
    ("vs.", "versus"),
    ("etc.", "et cetera"),
    ("e.g.", "for example"),
    ("i.e.", "that is"),
    ("no.", "number"),
    ("fig.", "figure"),
    ("approx.", "approximately"),
];

const SYMBOLS: &[(char, &str)] = &[('&', "and"), ('%', "percent"), ('+', "plus"), ('=', "equals"), ('@', "at")];

/// Read as a pause.
const PAUSE_MARKS: &[char] = &[',', ';', ':', '.', '!', '?', '(', ')', '[', ']'];

/// Dropped without a warning.
const SILENT: &[char] = &['"', '\'', '\u{2018}', '\u{2019}', '\u{201c}', '\u{201d}', '-', '\u{2013}', '\u{2014}', '/', '*', '_'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    /// Lowercase ASCII letters only.
    Word(String),
    Pause,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Normalized {
    pub tokens: Vec<Token>,
    /// Symbols that could not be read, in input order.
    pub dropped: Vec<String>,
}

/// Splits after `.`, `?` or `!` when followed by whitespace or the end.
/// Delimiters stay with their sentence; surrounding whitespace is trimmed.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        if matches!(c, '.' | '?' | '!') && it.peek().is_none_or(|&(_, n)| n.is_whitespace()) {
            let end = i + c.len_utf8();
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

fn fold_letter(c: char) -> Option<char> {
    if c.is_ascii_alphabetic() {
        return Some(c.to_ascii_lowercase());
    }
    let base = match c.to_lowercase().next()? {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' => 'a',
        'ç' => 'c',
        'è' | 'é' | 'ê' | 'ë' => 'e',
        'ì' | 'í' | 'î' | 'ï' => 'i',
        'ñ' => 'n',
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' => 'o',
        'ù' | 'ú' | 'û' | 'ü' => 'u',
        'ý' | 'ÿ' => 'y',
        _ => return None,
    };
    Some(base)
}

pub fn normalize_text(raw: &str) -> Normalized {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = Normalized::default();
    let mut i = 0;
    let word = |out: &mut Normalized, w: &str| out.tokens.push(Token::Word(w.to_string()));
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || SILENT.contains(&c) {
            i += 1;
        } else if let Some((len, expansion)) = abbreviation_at(&chars[i..]) {
            for w in expansion.split(' ') {
                word(&mut out, w);
            }
            i += len;
        } else if fold_letter(c).is_some() {
            let mut w = String::new();
            while i < chars.len() {
                if let Some(l) = fold_letter(chars[i]) {
                    w.push(l);
                } else if !(matches!(chars[i], '\'' | '\u{2019}') && chars.get(i + 1).and_then(|&n| fold_letter(n)).is_some()) {
                    break;
                }
                i += 1;
            }
            word(&mut out, &w);
        } else if c.is_ascii_digit() {
            i = read_number(&chars, i, &mut out);
        } else if PAUSE_MARKS.contains(&c) {
            if !out.tokens.is_empty() && out.tokens.last() != Some(&Token::Pause) {
                out.tokens.push(Token::Pause);
            }
            i += 1;
        } else if let Some(&(_, w)) = SYMBOLS.iter().find(|&&(s, _)| s == c) {
            word(&mut out, w);
            i += 1;
        } else {
            out.dropped.push(c.to_string());
            i += 1;
        }
    }
    if out.tokens.last() == Some(&Token::Pause) {
        out.tokens.pop();
    }
    out
}

fn abbreviation_at(chars: &[char]) -> Option<(usize, &'static str)> {
    ABBREVIATIONS.iter().find_map(|&(key, expansion)| {
        let n = key.chars().count();
        let matches = chars.len() >= n
            && key.chars().zip(chars).all(|(k, &c)| c.to_lowercase().eq(std::iter::once(k)))
            && chars.get(n).is_none_or(|c| !c.is_alphabetic());
        matches.then_some((n, expansion))
    })
}

/// Reads digits with optional `,ddd` grouping and a `.d+` fraction.
fn read_number(chars: &[char], mut i: usize, out: &mut Normalized) -> usize {
    let mut digits = String::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() {
            digits.push(c);
            i += 1;
        } else if c == ','
            && !digits.is_empty()
            && chars.len() >= i + 4
            && chars[i + 1..i + 4].iter().all(char::is_ascii_digit)
            && chars.get(i + 4).is_none_or(|c| !c.is_ascii_digit())
        {
            i += 1;
        } else {
            break;
        }
    }
    let push = |out: &mut Normalized, w: &'static str| out.tokens.push(Token::Word(w.to_string()));
    match digits.parse::<u32>().ok().and_then(number_words) {
        Some(words) => words.into_iter().for_each(|w| push(out, w)),
        None => digits.chars().filter_map(digit_word).for_each(|w| push(out, w)),
    }
    if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
        push(out, "point");
        i += 1;
        while let Some(w) = chars.get(i).copied().and_then(digit_word) {
            push(out, w);
            i += 1;
        }
    }
    i
}

/// Text form of tokens; normalizing it yields the same tokens.
pub fn render_tokens(tokens: &[Token]) -> String {
    let mut s = String::new();
    for t in tokens {
        match t {
            Token::Word(w) => {
                if !s.is_empty() {
                    s.push(' ');
                }
                s.push_str(w);
            }
            Token::Pause => s.push(','),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        normalize_text(s)
            .tokens
            .into_iter()
            .map(|t| match t {
                Token::Word(w) => w,
                Token::Pause => ",".into(),
            })
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(words("0"), ["zero"]);
        assert_eq!(words("123"), ["one", "hundred", "twenty", "three"]);
        assert_eq!(words("Dr. Smith"), ["doctor", "smith"]);
    }

    #[test]
    fn numbers_grouping_and_fractions() {
        assert_eq!(words("1,000"), ["one", "thousand"]);
        assert_eq!(words("3.25"), ["three", "point", "two", "five"]);
        assert_eq!(words("1234567"), ["one", "two", "three", "four", "five", "six", "seven"]);
        assert_eq!(words("1,2"), ["one", ",", "two"]);
    }

    #[test]
    fn pauses_and_drops() {
        let n = normalize_text("Hello, world!! (ok) ~ café don't e.g. x");
        assert_eq!(render_tokens(&n.tokens), "hello, world, ok, cafe dont for example x");
        assert_eq!(n.dropped, ["~"]);
        assert!(normalize_text("").tokens.is_empty());
        assert!(normalize_text(",,,").tokens.is_empty());
    }

    #[test]
    fn abbreviation_needs_word_boundary() {
        assert_eq!(words("Drive"), ["drive"]);
        assert_eq!(words("no."), ["number"]);
        assert_eq!(words("no"), ["no"]);
    }

    #[test]
    fn idempotent_on_own_output() {
        for s in ["Dr. No, 42 cats & 3.5 dogs; etc.", "A. B? C!", "x -- y / z", "1,234,567 ok"] {
            let once = normalize_text(s).tokens;
            assert_eq!(normalize_text(&render_tokens(&once)).tokens, once, "{s}");
        }
    }

    #[test]
    fn sentence_examples() {
        assert_eq!(split_sentences("A. B? C!"), ["A.", "B?", "C!"]);
        assert_eq!(split_sentences("no terminator"), ["no terminator"]);
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("  \n ").is_empty());
        assert_eq!(split_sentences("Wait... what?!\nYes.\x0cNext"), ["Wait...", "what?!", "Yes.", "Next"]);
        assert_eq!(split_sentences("3.5 is x."), ["3.5 is x."]);
    }
}
