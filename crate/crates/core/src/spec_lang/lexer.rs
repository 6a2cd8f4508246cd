use super::{Diagnostic, Severity};

pub const KEYWORDS: &[&str] = &[
    "ars",
    "objects",
    "labels",
    "steps",
    "order",
    "strategy",
    "accept",
    "query",
    "universal",
    "fail",
    "greatmost",
    "maxlen",
    "alternate",
    "colors",
    "restrict",
    "intersect",
    "unionP",
    "unionC",
    "word",
    "len",
    "at",
    "trace",
    "always",
    "and",
    "or",
    "not",
    "true",
    "false",
    "enumerate",
    "apply",
    "check",
    "witness",
    "prefix",
    "factor",
    "composition",
    "closed",
    "from",
    "depth",
    "horizon",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Ident,
    Keyword,
    Int(usize),
    Sym,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: Kind,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

const TWO_CHAR: &[&str] = &["<=", ">="];
const ONE_CHAR: &str = "{}(),;:<>=|*+?";

/// Line and column of a byte offset.
pub fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

pub fn diagnostic_at(src: &str, offset: usize, message: String, expected: Vec<String>) -> Diagnostic {
    let (line, column) = position(src, offset);
    Diagnostic {
        severity: Severity::Error,
        line,
        column,
        message,
        expected,
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let mut push = |kind, start: usize, end: usize, line: usize, line_start: usize| {
        toks.push(Token {
            kind,
            start,
            end,
            line,
            column: src[line_start..start].chars().count() + 1,
        });
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let kind = if KEYWORDS.contains(&&src[start..i]) {
                Kind::Keyword
            } else {
                Kind::Ident
            };
            push(kind, start, i, line, line_start);
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value = src[start..i].parse::<usize>().map_err(|_| {
                diagnostic_at(src, start, format!("integer `{}` is too large", &src[start..i]), vec![])
            })?;
            push(Kind::Int(value), start, i, line, line_start);
        } else if TWO_CHAR.iter().any(|s| src[i..].starts_with(s)) {
            push(Kind::Sym, i, i + 2, line, line_start);
            i += 2;
        } else if ONE_CHAR.as_bytes().contains(&c) {
            push(Kind::Sym, i, i + 1, line, line_start);
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(diagnostic_at(src, i, format!("unexpected character `{ch}`"), vec![]));
        }
    }
    push(Kind::Eof, src.len(), src.len(), line, line_start);
    Ok(toks)
}
