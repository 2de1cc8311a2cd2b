//! Line-oriented N-Triples reader and canonical writer.
//!
//! Each line is parsed independently, so a malformed line yields exactly one
//! [`ParseError`] and scanning continues with the next line.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{is_valid_iri, is_valid_language_tag, BlankNode, Graph, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ErrorCategory {
    BadIri,
    BadLiteral,
    BadBlankNode,
    MissingDot,
    TermCount,
    BadEscape,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("line {line}, column {column}: {message} ({category:?})")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub column: usize,
    pub message: String,
    pub category: ErrorCategory,
}

/// Classification of a single input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line {
    Triple(Triple),
    Comment,
    Blank,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    /// Column of the last character, for errors detected at end of line.
    fn last_column(&self) -> usize {
        self.chars.len().max(1)
    }

    fn error_at(&self, column: usize, category: ErrorCategory, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: column.clamp(1, self.last_column()),
            message: message.into(),
            category,
        }
    }

    fn error(&self, category: ErrorCategory, message: impl Into<String>) -> ParseError {
        self.error_at(self.column(), category, message)
    }

    /// Reads the hex digits of a `\u` / `\U` escape; the cursor sits after the letter.
    fn read_unicode_escape(&mut self, digits: usize, start: usize) -> Result<char, ParseError> {
        let mut value = 0u32;
        for _ in 0..digits {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => value = value * 16 + d,
                None => {
                    return Err(self.error_at(start, ErrorCategory::BadEscape, "malformed unicode escape"));
                }
            }
        }
        char::from_u32(value).ok_or_else(|| {
            self.error_at(
                start,
                ErrorCategory::BadEscape,
                format!("invalid code point U+{value:X}"),
            )
        })
    }

    fn parse_iri(&mut self) -> Result<Iri, ParseError> {
        let start = self.column();
        debug_assert_eq!(self.peek(), Some('<'));
        self.pos += 1;
        let mut text = String::new();
        loop {
            let here = self.column();
            match self.bump() {
                None => return Err(self.error_at(start, ErrorCategory::BadIri, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('u') => self.read_unicode_escape(4, here)?,
                        Some('U') => self.read_unicode_escape(8, here)?,
                        _ => {
                            return Err(self.error_at(
                                here,
                                ErrorCategory::BadEscape,
                                "only \\u and \\U escapes are allowed in IRIs",
                            ))
                        }
                    };
                    text.push(c);
                }
                Some(c) if c.is_whitespace() || c == '<' => {
                    return Err(self.error_at(
                        here,
                        ErrorCategory::BadIri,
                        format!("character {c:?} not allowed in IRI"),
                    ));
                }
                Some(c) => text.push(c),
            }
        }
        if !is_valid_iri(&text) {
            return Err(self.error_at(start, ErrorCategory::BadIri, "invalid IRI"));
        }
        Ok(Iri::new(text).expect("validated above"))
    }

    fn parse_blank(&mut self) -> Result<BlankNode, ParseError> {
        let start = self.column();
        self.pos += 1;
        if self.bump() != Some(':') {
            return Err(self.error_at(
                start,
                ErrorCategory::BadBlankNode,
                "expected '_:' before blank node label",
            ));
        }
        let mut label = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphanumeric) {
            label.push(c);
            self.pos += 1;
        }
        BlankNode::new(label).map_err(|_| {
            self.error_at(
                start,
                ErrorCategory::BadBlankNode,
                "blank node label must match [A-Za-z][A-Za-z0-9]*",
            )
        })
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        let start = self.column();
        self.pos += 1;
        let mut lexical = String::new();
        loop {
            let here = self.column();
            match self.bump() {
                None => return Err(self.error_at(start, ErrorCategory::BadLiteral, "unterminated literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.read_unicode_escape(4, here)?,
                        Some('U') => self.read_unicode_escape(8, here)?,
                        _ => return Err(self.error_at(here, ErrorCategory::BadEscape, "unknown escape sequence")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                let tag_start = self.column();
                self.pos += 1;
                let mut tag = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                    tag.push(c);
                    self.pos += 1;
                }
                if !is_valid_language_tag(&tag) {
                    return Err(self.error_at(tag_start, ErrorCategory::BadLiteral, "malformed language tag"));
                }
                Ok(Literal::with_language(lexical, tag).expect("validated above"))
            }
            Some('^') => {
                let dt_start = self.column();
                if self.peek_at(1) != Some('^') || self.peek_at(2) != Some('<') {
                    return Err(self.error_at(dt_start, ErrorCategory::BadLiteral, "expected '^^<datatype>'"));
                }
                self.pos += 2;
                let dt = self.parse_iri()?;
                Ok(Literal::with_datatype(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('<') => self.parse_iri().map(Term::Iri),
            Some('_') => self.parse_blank().map(Term::BlankNode),
            Some('"') => self.parse_literal().map(Term::Literal),
            Some(c) => Err(self.error(
                ErrorCategory::BadIri,
                format!("unexpected character {c:?}, expected a term"),
            )),
            None => Err(self.error(ErrorCategory::TermCount, "unexpected end of line")),
        }
    }
}

/// Parses one line (without its terminator). `line_number` is 1-based and only
/// used for error reporting.
pub fn parse_line(line: &str, line_number: usize) -> Result<Line, ParseError> {
    let mut cur = Cursor::new(line, line_number);
    cur.skip_ws();
    match cur.peek() {
        None => return Ok(Line::Blank),
        Some('#') => return Ok(Line::Comment),
        _ => {}
    }

    let mut terms: Vec<(usize, Term)> = Vec::with_capacity(3);
    loop {
        cur.skip_ws();
        match cur.peek() {
            None => {
                let category = if terms.len() == 3 {
                    ErrorCategory::MissingDot
                } else {
                    ErrorCategory::TermCount
                };
                let message = if terms.len() == 3 {
                    "missing terminating '.'".to_string()
                } else {
                    format!("expected 3 terms, found {}", terms.len())
                };
                return Err(cur.error_at(cur.last_column(), category, message));
            }
            Some('.') => {
                if terms.len() != 3 {
                    return Err(cur.error(
                        ErrorCategory::TermCount,
                        format!("expected 3 terms, found {}", terms.len()),
                    ));
                }
                cur.pos += 1;
                break;
            }
            Some(_) if terms.len() == 3 => {
                return Err(cur.error(ErrorCategory::TermCount, "more than 3 terms before '.'"));
            }
            Some(_) => {
                let column = cur.column();
                let term = cur.parse_term()?;
                terms.push((column, term));
            }
        }
    }

    cur.skip_ws();
    if !matches!(cur.peek(), None | Some('#')) {
        return Err(cur.error(ErrorCategory::TermCount, "unexpected content after '.'"));
    }

    let mut it = terms.into_iter();
    let (s_col, subject) = it.next().expect("three terms");
    let (p_col, predicate) = it.next().expect("three terms");
    let (_, object) = it.next().expect("three terms");
    if subject.is_literal() {
        return Err(cur.error_at(s_col, ErrorCategory::BadLiteral, "a literal cannot be a subject"));
    }
    if !matches!(predicate, Term::Iri(_)) {
        return Err(cur.error_at(p_col, ErrorCategory::BadIri, "predicate must be an IRI"));
    }
    Ok(Line::Triple(
        Triple::new(subject, predicate, object).expect("positions checked"),
    ))
}

/// Parses a single term in N-Triples syntax, e.g. `<http://a>`, `"x"@en`, `_:b0`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text, 1);
    cur.skip_ws();
    let term = cur.parse_term()?;
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.error(ErrorCategory::TermCount, "trailing content after term"));
    }
    Ok(term)
}

/// Parses a whole document. Every malformed line contributes one error; the
/// result is `Err` if there was at least one.
pub fn parse_document(text: &str) -> Result<Graph, Vec<ParseError>> {
    let mut graph = Graph::new();
    let mut errors = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        match parse_line(line, idx + 1) {
            Ok(Line::Triple(t)) => {
                graph.insert(t);
            }
            Ok(Line::Comment | Line::Blank) => {}
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(graph)
    } else {
        Err(errors)
    }
}

/// Canonical N-Triples: one triple per line, lines in byte order, LF terminated.
pub fn serialize(graph: &Graph) -> String {
    let mut out = String::new();
    for triple in graph.canonical_triples() {
        out.push_str(&triple.to_string());
        out.push('\n');
    }
    out
}

/// Wrapper to print a list of errors one per line.
pub struct ErrorList<'a>(pub &'a [ParseError]);

impl fmt::Display for ErrorList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in self.0 {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}
