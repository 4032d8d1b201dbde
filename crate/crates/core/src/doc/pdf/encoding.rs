//! Single-byte text encodings and `ToUnicode` overrides for simple fonts.

use std::collections::HashMap;

use super::lexer::{Lexer, Token};
use crate::doc::DocError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseEncoding {
    Standard,
    WinAnsi,
}

impl BaseEncoding {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "StandardEncoding" => Some(BaseEncoding::Standard),
            "WinAnsiEncoding" => Some(BaseEncoding::WinAnsi),
            _ => None,
        }
    }

    /// Maps a character code; unassigned codes yield `None`.
    pub fn decode(self, code: u8) -> Option<char> {
        match self {
            BaseEncoding::Standard => standard(code),
            BaseEncoding::WinAnsi => win_ansi(code),
        }
    }
}

fn standard(code: u8) -> Option<char> {
    let c = match code {
        0x27 => '\u{2019}',
        0x60 => '\u{2018}',
        0x20..=0x7e => code as char,
        0xa1 => '¡',
        0xa2 => '¢',
        0xa3 => '£',
        0xa4 => '\u{2044}',
        0xa5 => '¥',
        0xa6 => 'ƒ',
        0xa7 => '§',
        0xa8 => '¤',
        0xa9 => '\'',
        0xaa => '\u{201c}',
        0xab => '«',
        0xac => '\u{2039}',
        0xad => '\u{203a}',
        0xae => '\u{fb01}',
        0xaf => '\u{fb02}',
        0xb1 => '\u{2013}',
        0xb2 => '\u{2020}',
        0xb3 => '\u{2021}',
        0xb4 => '·',
        0xb6 => '¶',
        0xb7 => '\u{2022}',
        0xb8 => '\u{201a}',
        0xb9 => '\u{201e}',
        0xba => '\u{201d}',
        0xbb => '»',
        0xbc => '\u{2026}',
        0xbd => '\u{2030}',
        0xbf => '¿',
        0xc1 => '`',
        0xc2 => '´',
        0xc3 => 'ˆ',
        0xc4 => '˜',
        0xc5 => '¯',
        0xc6 => '˘',
        0xc7 => '˙',
        0xc8 => '¨',
        0xca => '˚',
        0xcb => '¸',
        0xcd => '˝',
        0xce => '˛',
        0xcf => 'ˇ',
        0xd0 => '\u{2014}',
        0xe1 => 'Æ',
        0xe3 => 'ª',
        0xe8 => 'Ł',
        0xe9 => 'Ø',
        0xea => 'Œ',
        0xeb => 'º',
        0xf1 => 'æ',
        0xf5 => 'ı',
        0xf8 => 'ł',
        0xf9 => 'ø',
        0xfa => 'œ',
        0xfb => 'ß',
        _ => return None,
    };
    Some(c)
}

const WIN_ANSI_80: [Option<char>; 32] = [
    Some('€'), None, Some('‚'), Some('ƒ'), Some('„'), Some('…'), Some('†'), Some('‡'),
    Some('ˆ'), Some('‰'), Some('Š'), Some('‹'), Some('Œ'), None, Some('Ž'), None,
    None, Some('\u{2018}'), Some('\u{2019}'), Some('\u{201c}'), Some('\u{201d}'), Some('•'), Some('–'), Some('—'),
    Some('˜'), Some('™'), Some('š'), Some('›'), Some('œ'), None, Some('ž'), Some('Ÿ'),
];

/// Unused codes above 0x7e render as a bullet.
fn win_ansi(code: u8) -> Option<char> {
    match code {
        0x20..=0x7e => Some(code as char),
        0x7f => Some('\u{2022}'),
        0x80..=0x9f => Some(WIN_ANSI_80[usize::from(code - 0x80)].unwrap_or('\u{2022}')),
        0xa0 => Some(' '),
        0xad => Some('-'),
        0xa1..=0xff => Some(code as char),
        _ => None,
    }
}

/// A simple font's code-to-text mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct FontEncoding {
    pub base: BaseEncoding,
    pub to_unicode: HashMap<u8, String>,
}

impl Default for FontEncoding {
    fn default() -> Self {
        FontEncoding { base: BaseEncoding::Standard, to_unicode: HashMap::new() }
    }
}

impl FontEncoding {
    pub fn decode_into(&self, bytes: &[u8], out: &mut String) {
        for &b in bytes {
            if let Some(s) = self.to_unicode.get(&b) {
                out.push_str(s);
            } else if let Some(c) = self.base.decode(b) {
                out.push(c);
            }
        }
    }
}

/// Reads `bfchar` entries with one-byte source codes from a CMap program.
pub fn parse_to_unicode(cmap: &[u8]) -> Result<HashMap<u8, String>, DocError> {
    let mut map = HashMap::new();
    let mut lx = Lexer::new(cmap, 0);
    let mut in_bfchar = false;
    let mut pending: Option<(usize, Vec<u8>)> = None;
    while let Some(tok) = lx.next()? {
        match tok {
            Token::Keyword(b"beginbfchar") => in_bfchar = true,
            Token::Keyword(b"endbfchar") => in_bfchar = false,
            Token::Keyword(b"beginbfrange") => {
                return Err(DocError::UnsupportedFeature("ToUnicode bfrange".into()));
            }
            Token::String(s) if in_bfchar => match pending.take() {
                None => pending = Some((lx.pos, s)),
                Some((at, src)) => {
                    let [code] = src[..] else {
                        return Err(DocError::UnsupportedFeature("multi-byte character codes".into()));
                    };
                    map.insert(code, utf16_be(&s).ok_or_else(|| DocError::malformed(at, "bad UTF-16 in ToUnicode"))?);
                }
            },
            // codespace ranges, dictionaries and CMap boilerplate carry no mappings
            _ => {}
        }
    }
    Ok(map)
}

fn utf16_be(bytes: &[u8]) -> Option<String> {
    if bytes.len() % 2 != 0 {
        return None;
    }
    let units: Vec<u16> = bytes.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    String::from_utf16(&units).ok()
}
