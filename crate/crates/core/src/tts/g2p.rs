//! Grapheme-to-phoneme conversion: exception lexicon first, then greedy
//! left-to-right letter-to-sound rules.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::phoneme::{parse_phonemes, Phoneme};
use super::TtsError;

pub type Lexicon = HashMap<String, Vec<Phoneme>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context {
    Any,
    /// Pattern starts the word.
    Start,
    /// Pattern ends the word.
    End,
    /// Next letter is e, i or y.
    BeforeFront,
    /// Vowel followed by one consonant and a word-final e.
    MagicE,
    /// Word-final e after a consonant in words longer than two letters.
    SilentFinal,
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub pattern: &'static str,
    pub phonemes: &'static str,
    pub context: Context,
}

const fn r(pattern: &'static str, phonemes: &'static str, context: Context) -> Rule {
    Rule { pattern, phonemes, context }
}

use Context::*;

/// Tried in order at each position; the first applicable rule consumes its
/// pattern. Single letters at the end guarantee progress.
pub const RULES: &[Rule] = &[
    r("tch", "CH", Any),
    r("sch", "S K", Any),
    r("ough", "AO", Any),
    r("augh", "AO", Any),
    r("eigh", "EY", Any),
    r("igh", "AY", Any),
    r("ation", "EY SH AH N", Any),
    r("tion", "SH AH N", Any),
    r("sion", "ZH AH N", Any),
    r("kn", "N", Start),
    r("wr", "R", Start),
    r("ps", "S", Start),
    r("gh", "G", Start),
    r("gh", "", Any),
    r("ck", "K", Any),
    r("ch", "CH", Any),
    r("sh", "SH", Any),
    r("th", "TH", Any),
    r("ph", "F", Any),
    r("wh", "W", Any),
    r("ng", "NG", Any),
    r("qu", "K W", Any),
    r("ge", "JH", End),
    r("ee", "IY", Any),
    r("ea", "IY", Any),
    r("oo", "UW", Any),
    r("ou", "AW", Any),
    r("ow", "OW", Any),
    r("oi", "OY", Any),
    r("oy", "OY", Any),
    r("ai", "EY", Any),
    r("ay", "EY", Any),
    r("au", "AO", Any),
    r("aw", "AO", Any),
    r("ie", "IY", Any),
    r("ei", "EY", Any),
    r("ey", "IY", Any),
    r("ue", "UW", Any),
    r("ew", "UW", Any),
    r("oa", "OW", Any),
    r("ar", "AA R", Any),
    r("er", "ER", Any),
    r("ir", "ER", Any),
    r("ur", "ER", Any),
    r("or", "AO R", Any),
    r("bb", "B", Any),
    r("cc", "K", Any),
    r("dd", "D", Any),
    r("ff", "F", Any),
    r("gg", "G", Any),
    r("ll", "L", Any),
    r("mm", "M", Any),
    r("nn", "N", Any),
    r("pp", "P", Any),
    r("rr", "R", Any),
    r("ss", "S", Any),
    r("tt", "T", Any),
    r("zz", "Z", Any),
    r("a", "EY", MagicE),
    r("e", "IY", MagicE),
    r("i", "AY", MagicE),
    r("o", "OW", MagicE),
    r("u", "UW", MagicE),
    r("e", "", SilentFinal),
    r("c", "S", BeforeFront),
    r("y", "Y", Start),
    r("y", "IY", End),
    r("y", "IH", Any),
    r("a", "AE", Any),
    r("b", "B", Any),
    r("c", "K", Any),
    r("d", "D", Any),
    r("e", "EH", Any),
    r("f", "F", Any),
    r("g", "G", Any),
    r("h", "HH", Any),
    r("i", "IH", Any),
    r("j", "JH", Any),
    r("k", "K", Any),
    r("l", "L", Any),
    r("m", "M", Any),
    r("n", "N", Any),
    r("o", "AA", Any),
    r("p", "P", Any),
    r("q", "K", Any),
    r("r", "R", Any),
    r("s", "S", Any),
    r("t", "T", Any),
    r("u", "AH", Any),
    r("v", "V", Any),
    r("w", "W", Any),
    r("x", "K S", Any),
    r("z", "Z", Any),
];

/// Pronunciations of one-letter words.
const LETTER_WORDS: [&str; 26] = [
    "AH", "B IY", "S IY", "D IY", "IY", "EH F", "JH IY", "EY CH", "AY", "JH EY", "K EY", "EH L", "EH M", "EH N", "OW",
    "P IY", "K Y UW", "AA R", "EH S", "T IY", "Y UW", "V IY", "D AH B AH L Y UW", "EH K S", "W AY", "Z IY",
];

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn applies(rule: &Rule, w: &[u8], i: usize) -> bool {
    let p = rule.pattern.as_bytes();
    if !w[i..].starts_with(p) {
        return false;
    }
    let end = i + p.len();
    match rule.context {
        Any => true,
        Start => i == 0,
        End => end == w.len(),
        BeforeFront => matches!(w.get(end), Some(b'e' | b'i' | b'y')),
        MagicE => end + 2 == w.len() && !is_vowel(w[end]) && w[end] != b'r' && w[end + 1] == b'e',
        SilentFinal => end == w.len() && w.len() > 2 && !is_vowel(w[i - 1]),
    }
}

pub fn parse_lexicon(text: &str) -> Result<Lexicon, TtsError> {
    let mut lex = Lexicon::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, phones) = line.split_once(char::is_whitespace).ok_or_else(|| TtsError::BadLexicon(n + 1))?;
        let phones = parse_phonemes(phones).map_err(|_| TtsError::BadLexicon(n + 1))?;
        if phones.is_empty() || lex.insert(word.to_string(), phones).is_some() {
            return Err(TtsError::BadLexicon(n + 1));
        }
    }
    Ok(lex)
}

pub fn bundled_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| parse_lexicon(include_str!("../../data/lexicon.txt")).expect("bundled lexicon parses"))
}

/// Bundled lexicon and rules. Never empty for non-empty input.
pub fn g2p(word: &str) -> Vec<Phoneme> {
    g2p_with(word, bundled_lexicon(), RULES)
}

pub fn g2p_with(word: &str, lexicon: &Lexicon, rules: &[Rule]) -> Vec<Phoneme> {
    let w: Vec<u8> = word.bytes().filter(u8::is_ascii_alphabetic).map(|b| b.to_ascii_lowercase()).collect();
    if w.is_empty() {
        return if word.is_empty() { Vec::new() } else { vec![ph("AH")] };
    }
    let key = std::str::from_utf8(&w).expect("ascii");
    if let Some(p) = lexicon.get(key) {
        return p.clone();
    }
    if w.len() == 1 {
        return parse_phonemes(LETTER_WORDS[usize::from(w[0] - b'a')]).expect("valid letter table");
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        match rules.iter().find(|r| applies(r, &w, i)) {
            Some(rule) => {
                out.extend(parse_phonemes(rule.phonemes).expect("valid rule table"));
                i += rule.pattern.len();
            }
            None => i += 1,
        }
    }
    if out.is_empty() {
        out.push(ph("AH"));
    }
    out
}

fn ph(s: &str) -> Phoneme {
    s.parse().expect("inventory phoneme")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn say(w: &str) -> String {
        g2p(w).iter().map(|p| p.name()).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn examples() {
        assert_eq!(say("cat"), "K AE T");
        assert_eq!(say("a"), "AH");
    }

    #[test]
    fn rules() {
        assert_eq!(say("make"), "M EY K");
        assert_eq!(say("night"), "N AY T");
        assert_eq!(say("ship"), "SH IH P");
        assert_eq!(say("city"), "S IH T IY");
        assert_eq!(say("know"), "N OW");
        assert_eq!(say("station"), "S T EY SH AH N");
        assert_eq!(say("motion"), "M AA SH AH N");
        assert_eq!(say("yes"), "Y EH S");
        assert_eq!(say("age"), "EY JH");
        assert_eq!(say("b"), "B IY");
    }

    #[test]
    fn rules_cover_every_letter() {
        for c in b'a'..=b'z' {
            let w = [c, c, c];
            assert!(!g2p(std::str::from_utf8(&w).unwrap()).is_empty());
        }
    }

    #[test]
    fn bundled_lexicon_loads() {
        assert!(bundled_lexicon().len() > 50);
        assert!(parse_lexicon("x QQ").is_err());
        assert!(parse_lexicon("x AA\nx AA").is_err());
    }
}
