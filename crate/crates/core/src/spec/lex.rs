use std::fmt;

use num_bigint::BigUint;
use num_traits::Num;
use thiserror::Error;

/// A parse failure with a 1-based line and column.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        }
    }
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    /// Error not tied to a position, e.g. an empty document.
    pub fn whole(message: impl Into<String>) -> Self {
        ParseError::new(0, 0, message)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub col: usize,
}

/// One non-blank line with comments stripped.
#[derive(Clone, Debug)]
pub(crate) struct Line<'a> {
    pub no: usize,
    pub text: &'a str,
    pub tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    pub fn err(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError::new(self.no, col, message)
    }

    pub fn err_at(&self, tok: usize, message: impl Into<String>) -> ParseError {
        let col = self.tokens.get(tok).map_or(self.text.len() + 1, |t| t.col);
        ParseError::new(self.no, col, message)
    }

    pub fn keyword(&self) -> &'a str {
        self.tokens[0].text
    }

    pub fn expect_len(&self, n: usize, usage: &str) -> Result<(), ParseError> {
        if self.tokens.len() == n {
            Ok(())
        } else if self.tokens.len() < n {
            Err(self.err_at(self.tokens.len(), format!("expected `{usage}`")))
        } else {
            Err(self.err_at(n, format!("unexpected token, expected `{usage}`")))
        }
    }

    pub fn ident(&self, i: usize) -> Result<&'a str, ParseError> {
        let t = self.tokens[i];
        if is_ident(t.text) {
            Ok(t.text)
        } else {
            Err(self.err_at(i, format!("invalid identifier `{}`", t.text)))
        }
    }

    /// The raw text after token `i` (used for `R(a, b)` style arguments).
    pub fn rest_from(&self, i: usize) -> (&'a str, usize) {
        match self.tokens.get(i) {
            Some(t) => (&self.text[t.col - 1..], t.col),
            None => ("", self.text.len() + 1),
        }
    }
}

pub(crate) fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &body[s..pos],
                        col: s + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            tokens.push(Token {
                text: &body[s..],
                col: s + 1,
            });
        }
        if !tokens.is_empty() {
            out.push(Line {
                no: i + 1,
                text: body,
                tokens,
            });
        }
    }
    out
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Decimal or `0b` binary non-negative integer.
pub fn parse_big(s: &str) -> Option<BigUint> {
    if let Some(bits) = s.strip_prefix("0b") {
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return None;
        }
        BigUint::from_str_radix(bits, 2).ok()
    } else {
        if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        BigUint::from_str_radix(s, 10).ok()
    }
}

/// Parses `m=<int>` from a header token.
pub(crate) fn parse_m(line: &Line<'_>, tok: usize) -> Result<BigUint, ParseError> {
    let t = line.tokens[tok].text;
    let value = t
        .strip_prefix("m=")
        .ok_or_else(|| line.err_at(tok, "expected `m=<int>`"))?;
    parse_big(value).ok_or_else(|| line.err_at(tok, format!("invalid bound `{value}`")))
}

/// Identifiers with their columns.
pub(crate) type Args<'a> = Vec<(&'a str, usize)>;

/// Splits `Name(a, b, c)` into the name and argument list, with columns.
pub(crate) fn parse_application<'a>(
    line: &Line<'a>,
    text: &'a str,
    col: usize,
) -> Result<(&'a str, Args<'a>), ParseError> {
    let open = text
        .find('(')
        .ok_or_else(|| line.err(col, "expected `Name(arg, ...)`"))?;
    let name = text[..open].trim();
    if !is_ident(name) {
        return Err(line.err(col, format!("invalid identifier `{name}`")));
    }
    let close = text
        .rfind(')')
        .filter(|&c| c > open)
        .ok_or_else(|| line.err(col + open, "missing `)`"))?;
    if !text[close + 1..].trim().is_empty() {
        return Err(line.err(col + close + 1, "unexpected text after `)`"));
    }
    let inner = &text[open + 1..close];
    let mut args = Vec::new();
    if !inner.trim().is_empty() {
        let mut offset = open + 1;
        for part in inner.split(',') {
            let lead = part.len() - part.trim_start().len();
            let arg = part.trim();
            if !is_ident(arg) {
                return Err(line.err(col + offset + lead, format!("invalid identifier `{arg}`")));
            }
            args.push((arg, col + offset + lead));
            offset += part.len() + 1;
        }
    }
    Ok((name, args))
}

/// Splits a comma list `a,b,c` (possibly spread over several tokens).
pub(crate) fn parse_ident_list<'a>(
    line: &Line<'a>,
    from: usize,
) -> Result<Vec<(&'a str, usize)>, ParseError> {
    let (text, col) = line.rest_from(from);
    let mut out = Vec::new();
    if text.trim().is_empty() {
        return Ok(out);
    }
    let mut offset = 0;
    for part in text.split(',') {
        let lead = part.len() - part.trim_start().len();
        let item = part.trim();
        if !is_ident(item) {
            return Err(line.err(col + offset + lead, format!("invalid identifier `{item}`")));
        }
        out.push((item, col + offset + lead));
        offset += part.len() + 1;
    }
    Ok(out)
}
