//! Byte cursor and the token readers shared by the N-Triples and Turtle
//! parsers.

use crate::model::term::{is_forbidden_iri_char, BlankNode, Iri};
use crate::rdf::{Position, RdfError};

pub(crate) struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    /// Line number of byte 0 of `text` (1-based).
    first_line: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str, first_line: usize) -> Self {
        Cursor {
            text,
            pos: 0,
            first_line,
        }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn full_text(&self) -> &'a str {
        self.text
    }

    pub fn rewind(&mut self, bytes: usize) {
        self.pos -= bytes;
    }

    pub fn advance(&mut self, bytes: usize) {
        self.pos += bytes;
    }

    pub fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    pub fn position_at(&self, offset: usize) -> Position {
        let before = &self.text[..offset];
        let line = before.matches('\n').count();
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        Position {
            line: self.first_line + line,
            column: before[line_start..].chars().count() + 1,
        }
    }

    pub fn position(&self) -> Position {
        self.position_at(self.pos)
    }

    pub fn error(&self, reason: impl Into<String>) -> RdfError {
        RdfError::parse(self.position(), reason)
    }

    pub fn error_at(&self, offset: usize, reason: impl Into<String>) -> RdfError {
        RdfError::parse(self.position_at(offset), reason)
    }

    /// Skips spaces and tabs only.
    pub fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    /// Skips all whitespace and `#` comments.
    pub fn skip_ws_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    /// `\uXXXX` / `\UXXXXXXXX` after the backslash has been consumed and the
    /// `u`/`U` is next.
    fn read_uchar(&mut self, start: usize) -> Result<char, RdfError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error_at(start, "invalid escape")),
        };
        let hex = self
            .rest()
            .get(..len)
            .filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| self.error_at(start, "truncated unicode escape"))?;
        self.pos += len;
        let code = u32::from_str_radix(hex, 16).expect("hex digits");
        char::from_u32(code).ok_or_else(|| self.error_at(start, format!("escape U+{code:X} is not a scalar value")))
    }

    /// `<...>` with UCHAR escapes; the result must be an absolute IRI.
    pub fn read_iriref(&mut self) -> Result<Iri, RdfError> {
        let start = self.pos;
        if !self.eat('<') {
            return Err(self.error("expected `<`"));
        }
        let mut value = String::new();
        loop {
            let here = self.pos;
            match self.bump() {
                None | Some('\n') => return Err(self.error_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = self.read_uchar(here)?;
                    value.push(c);
                }
                Some(c) if is_forbidden_iri_char(c) => {
                    return Err(self.error_at(here, format!("character {c:?} not allowed in IRI")))
                }
                Some(c) => value.push(c),
            }
        }
        Iri::new(&value).map_err(|e| self.error_at(start, e.to_string()))
    }

    /// `_:label`.
    pub fn read_blank(&mut self) -> Result<BlankNode, RdfError> {
        let start = self.pos;
        if !self.eat_str("_:") {
            return Err(self.error("expected `_:`"));
        }
        let label_start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                self.bump();
            } else {
                break;
            }
        }
        BlankNode::new(&self.text[label_start..self.pos]).map_err(|e| self.error_at(start, e.to_string()))
    }

    /// Quoted string body. `quote` is `"` or `'`; the opening quote has not
    /// been consumed. Raw line breaks are rejected.
    pub fn read_quoted(&mut self) -> Result<String, RdfError> {
        let start = self.pos;
        let quote = match self.bump() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error_at(start, "expected string literal")),
        };
        let mut out = String::new();
        loop {
            let here = self.pos;
            match self.bump() {
                None | Some('\n' | '\r') => return Err(self.error_at(start, "unterminated string literal")),
                Some(c) if c == quote => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => out.push(self.read_uchar(here)?),
                    Some(e) => {
                        self.bump();
                        out.push(match e {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            _ => return Err(self.error_at(here, format!("unknown escape `\\{e}`"))),
                        });
                    }
                    None => return Err(self.error_at(start, "unterminated string literal")),
                },
                Some(c) => out.push(c),
            }
        }
        Ok(out)
    }

    /// Language tag after `@` (the `@` already consumed).
    pub fn read_lang(&mut self) -> Result<String, RdfError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                self.bump();
            } else {
                break;
            }
        }
        let tag = &self.text[start..self.pos];
        if !crate::model::term::is_lang_tag(tag) {
            return Err(self.error_at(start, format!("invalid language tag `{tag}`")));
        }
        Ok(tag.to_string())
    }
}

/// Appends `s` escaped for a double-quoted literal: ECHAR for the named
/// controls, quote and backslash; UCHAR for the remaining C0 controls and DEL.
pub(crate) fn escape_literal_into(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
}
