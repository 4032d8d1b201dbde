//! Tokenizer and direct-object parser shared by the file-structure reader and
//! the content-stream interpreter.

use super::object::{Dict, ObjRef, Object};
use crate::doc::DocError;

const MAX_DEPTH: usize = 64;

pub(crate) fn is_white(b: u8) -> bool {
    matches!(b, 0 | b'\t' | b'\n' | b'\x0c' | b'\r' | b' ')
}

pub(crate) fn is_delim(b: u8) -> bool {
    matches!(b, b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%')
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token<'a> {
    Int(i64),
    Real(f64),
    String(Vec<u8>),
    Name(String),
    ArrayOpen,
    ArrayClose,
    DictOpen,
    DictClose,
    Keyword(&'a [u8]),
}

pub(crate) struct Lexer<'a> {
    buf: &'a [u8],
    pub pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(buf: &'a [u8], pos: usize) -> Self {
        Lexer { buf, pos: pos.min(buf.len()) }
    }

    pub fn buf(&self) -> &'a [u8] {
        self.buf
    }

    fn peek(&self) -> Option<u8> {
        self.buf.get(self.pos).copied()
    }

    fn err(&self, reason: impl Into<String>) -> DocError {
        DocError::malformed(self.pos, reason)
    }

    pub fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if is_white(b) {
                self.pos += 1;
            } else if b == b'%' {
                while let Some(c) = self.peek() {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Next token, or `None` at end of input.
    pub fn next(&mut self) -> Result<Option<Token<'a>>, DocError> {
        self.skip_ws();
        let Some(b) = self.peek() else { return Ok(None) };
        let tok = match b {
            b'(' => Token::String(self.literal_string()?),
            b'<' if self.buf.get(self.pos + 1) == Some(&b'<') => {
                self.pos += 2;
                Token::DictOpen
            }
            b'<' => Token::String(self.hex_string()?),
            b'>' if self.buf.get(self.pos + 1) == Some(&b'>') => {
                self.pos += 2;
                Token::DictClose
            }
            b'[' => {
                self.pos += 1;
                Token::ArrayOpen
            }
            b']' => {
                self.pos += 1;
                Token::ArrayClose
            }
            b'/' => Token::Name(self.name()),
            b'+' | b'-' | b'.' | b'0'..=b'9' => self.number()?,
            b')' | b'>' | b'{' | b'}' => return Err(self.err(format!("unexpected {:?}", b as char))),
            _ => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if is_white(c) || is_delim(c) {
                        break;
                    }
                    self.pos += 1;
                }
                Token::Keyword(&self.buf[start..self.pos])
            }
        };
        Ok(Some(tok))
    }

    fn number(&mut self) -> Result<Token<'a>, DocError> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        let mut dot = false;
        let mut digits = 0usize;
        while let Some(c) = self.peek() {
            match c {
                b'0'..=b'9' => digits += 1,
                b'.' if !dot => dot = true,
                _ => break,
            }
            self.pos += 1;
        }
        if digits == 0 {
            return Err(DocError::malformed(start, "number without digits"));
        }
        let text = std::str::from_utf8(&self.buf[start..self.pos]).map_err(|_| self.err("bad number"))?;
        if !dot {
            if let Ok(i) = text.parse::<i64>() {
                return Ok(Token::Int(i));
            }
        }
        // "5." and ".5" are valid PDF reals; f64 parsing accepts both
        text.parse::<f64>().map(Token::Real).map_err(|_| DocError::malformed(start, "bad number"))
    }

    fn name(&mut self) -> String {
        self.pos += 1;
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if is_white(c) || is_delim(c) {
                break;
            }
            if c == b'#' {
                let hex = self.buf.get(self.pos + 1..self.pos + 3).and_then(|h| {
                    std::str::from_utf8(h).ok().and_then(|s| u8::from_str_radix(s, 16).ok())
                });
                if let Some(v) = hex {
                    out.push(v);
                    self.pos += 3;
                    continue;
                }
            }
            out.push(c);
            self.pos += 1;
        }
        String::from_utf8_lossy(&out).into_owned()
    }

    fn literal_string(&mut self) -> Result<Vec<u8>, DocError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = Vec::new();
        let mut depth = 1usize;
        loop {
            let Some(c) = self.peek() else {
                return Err(DocError::malformed(start, "unterminated string"));
            };
            self.pos += 1;
            match c {
                b'(' => {
                    depth += 1;
                    out.push(c);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(out);
                    }
                    out.push(c);
                }
                b'\r' => {
                    if self.peek() == Some(b'\n') {
                        self.pos += 1;
                    }
                    out.push(b'\n');
                }
                b'\\' => {
                    let Some(e) = self.peek() else { continue };
                    self.pos += 1;
                    match e {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(8),
                        b'f' => out.push(12),
                        b'0'..=b'7' => {
                            let mut v = u32::from(e - b'0');
                            for _ in 0..2 {
                                match self.peek() {
                                    Some(d @ b'0'..=b'7') => {
                                        v = v * 8 + u32::from(d - b'0');
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push(v as u8);
                        }
                        b'\r' => {
                            if self.peek() == Some(b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'\n' => {}
                        other => out.push(other),
                    }
                }
                _ => out.push(c),
            }
        }
    }

    fn hex_string(&mut self) -> Result<Vec<u8>, DocError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = Vec::new();
        let mut hi: Option<u8> = None;
        loop {
            let Some(c) = self.peek() else {
                return Err(DocError::malformed(start, "unterminated hex string"));
            };
            self.pos += 1;
            let v = match c {
                b'>' => break,
                b'0'..=b'9' => c - b'0',
                b'a'..=b'f' => c - b'a' + 10,
                b'A'..=b'F' => c - b'A' + 10,
                _ if is_white(c) => continue,
                _ => return Err(DocError::malformed(self.pos - 1, "bad hex digit")),
            };
            match hi.take() {
                Some(h) => out.push(h << 4 | v),
                None => hi = Some(v),
            }
        }
        if let Some(h) = hi {
            out.push(h << 4);
        }
        Ok(out)
    }

    /// Parses one direct object. With `refs` set, `n g R` becomes a reference.
    pub fn object(&mut self, refs: bool) -> Result<Object, DocError> {
        self.object_at_depth(refs, 0)
    }

    fn object_at_depth(&mut self, refs: bool, depth: usize) -> Result<Object, DocError> {
        if depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let tok = self.next()?.ok_or_else(|| self.err("unexpected end of input"))?;
        self.finish_object(tok, refs, depth)
    }

    /// Completes an object whose first token has already been read.
    pub fn finish_object(&mut self, tok: Token<'a>, refs: bool, depth: usize) -> Result<Object, DocError> {
        Ok(match tok {
            Token::Int(i) => {
                if refs {
                    if let Some(r) = self.try_ref(i) {
                        return Ok(Object::Ref(r));
                    }
                }
                Object::Int(i)
            }
            Token::Real(r) => Object::Real(r),
            Token::String(s) => Object::String(s),
            Token::Name(n) => Object::Name(n),
            Token::ArrayOpen => {
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.peek() == Some(b']') {
                        self.pos += 1;
                        break;
                    }
                    if self.peek().is_none() {
                        return Err(self.err("unterminated array"));
                    }
                    items.push(self.object_at_depth(refs, depth + 1)?);
                }
                Object::Array(items)
            }
            Token::DictOpen => Object::Dict(self.dict_body(refs, depth)?),
            Token::Keyword(b"true") => Object::Bool(true),
            Token::Keyword(b"false") => Object::Bool(false),
            Token::Keyword(b"null") => Object::Null,
            Token::Keyword(k) => {
                return Err(self.err(format!("unexpected keyword {:?}", String::from_utf8_lossy(k))))
            }
            Token::ArrayClose | Token::DictClose => return Err(self.err("unbalanced delimiter")),
        })
    }

    fn dict_body(&mut self, refs: bool, depth: usize) -> Result<Dict, DocError> {
        let mut dict = Dict::new();
        loop {
            match self.next()? {
                Some(Token::DictClose) => return Ok(dict),
                Some(Token::Name(key)) => {
                    let value = self.object_at_depth(refs, depth + 1)?;
                    dict.insert(key, value);
                }
                None => return Err(self.err("unterminated dictionary")),
                Some(_) => return Err(self.err("dictionary key is not a name")),
            }
        }
    }

    fn try_ref(&mut self, num: i64) -> Option<ObjRef> {
        let save = self.pos;
        let r = (|| {
            let num = u32::try_from(num).ok()?;
            let Ok(Some(Token::Int(gen))) = self.next() else { return None };
            let gen = u16::try_from(gen).ok()?;
            match self.next() {
                Ok(Some(Token::Keyword(b"R"))) => Some(ObjRef { num, gen }),
                _ => None,
            }
        })();
        if r.is_none() {
            self.pos = save;
        }
        r
    }

    /// Consumes `kw` or fails.
    pub fn expect_keyword(&mut self, kw: &[u8]) -> Result<(), DocError> {
        let at = self.pos;
        match self.next()? {
            Some(Token::Keyword(k)) if k == kw => Ok(()),
            _ => Err(DocError::malformed(at, format!("expected {:?}", String::from_utf8_lossy(kw)))),
        }
    }

    pub fn expect_uint(&mut self) -> Result<u64, DocError> {
        let at = self.pos;
        match self.next()? {
            Some(Token::Int(i)) if i >= 0 => Ok(i as u64),
            _ => Err(DocError::malformed(at, "expected non-negative integer")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(s: &str) -> Object {
        Lexer::new(s.as_bytes(), 0).object(true).unwrap()
    }

    #[test]
    fn literal_string_escapes() {
        assert_eq!(obj(r"(a\(b\)c\\d\101\n)"), Object::String(b"a(b)c\\dA\n".to_vec()));
        assert_eq!(obj("(x(y)z)"), Object::String(b"x(y)z".to_vec()));
        assert_eq!(obj("(line\\\nwrap)"), Object::String(b"linewrap".to_vec()));
        assert_eq!(obj("(\\0053)"), Object::String(b"\x053".to_vec()));
    }

    #[test]
    fn hex_string_pads_odd_digit() {
        assert_eq!(obj("<48 69 7>"), Object::String(vec![0x48, 0x69, 0x70]));
    }

    #[test]
    fn names_decode_hex_escapes() {
        assert_eq!(obj("/A#20B"), Object::Name("A B".into()));
    }

    #[test]
    fn refs_need_lookahead() {
        assert_eq!(obj("[1 0 R 2 3]"), Object::Array(vec![
            Object::Ref(ObjRef { num: 1, gen: 0 }),
            Object::Int(2),
            Object::Int(3),
        ]));
    }

    #[test]
    fn numbers() {
        assert_eq!(obj("-12"), Object::Int(-12));
        assert_eq!(obj(".5"), Object::Real(0.5));
        assert_eq!(obj("3."), Object::Real(3.0));
        assert!(Lexer::new(b"-", 0).object(true).is_err());
    }

    #[test]
    fn dictionary_with_comment() {
        let o = obj("<< /Type /Page % note\n /Count 3 >>");
        let d = o.as_dict().unwrap();
        assert_eq!(d["Type"], Object::Name("Page".into()));
        assert_eq!(d["Count"], Object::Int(3));
    }

    #[test]
    fn deep_nesting_is_an_error() {
        let s = "[".repeat(200) + &"]".repeat(200);
        assert!(Lexer::new(s.as_bytes(), 0).object(true).is_err());
    }
}
