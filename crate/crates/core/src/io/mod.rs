//! Text formats for instances, decompositions, arrangements and NLC
//! expressions, and the JSON result report.
//!
//! Every format is line based, whitespace separated and 1-indexed. Lines
//! starting with `c` are comments. Parsers collect every error they find
//! instead of stopping at the first one.

mod dmst;
mod nlc;
mod report;
mod td;

use std::fmt;

use thiserror::Error;

pub use dmst::{parse_instance, write_instance, ParsedInstance};
pub use nlc::{parse_nlc, write_nlc};
pub use report::{Report, WitnessReport};
pub use td::{parse_arr, parse_td, write_arr, write_td, ParsedTd};

/// Stable error classes, one per documented rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    /// Unknown line type or wrong number of fields.
    Syntax,
    /// A field that should be a non-negative integer is not.
    Number,
    /// A vertex, id or label outside its declared range.
    Range,
    /// The header is missing or repeated.
    Header,
    /// Declared counts disagree with the body.
    Count,
    /// Something required is absent.
    Missing,
    /// An id or value appears twice where it must be unique.
    Duplicate,
    /// The body is well formed but describes an invalid object.
    Semantic,
}

impl ErrorCode {
    pub fn name(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "syntax",
            ErrorCode::Number => "number",
            ErrorCode::Range => "range",
            ErrorCode::Header => "header",
            ErrorCode::Count => "count",
            ErrorCode::Missing => "missing",
            ErrorCode::Duplicate => "duplicate",
            ErrorCode::Semantic => "semantic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based; 0 for problems with the file as a whole.
    pub line: usize,
    /// 1-based character column of the offending field; 0 when unknown.
    pub column: usize,
    pub code: ErrorCode,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (0, _) => write!(f, "[{}] {}", self.code.name(), self.message),
            (l, 0) => write!(f, "line {l}: [{}] {}", self.code.name(), self.message),
            (l, c) => write!(f, "line {l}, column {c}: [{}] {}", self.code.name(), self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct ParseErrors(pub Vec<ParseError>);

impl ParseErrors {
    pub fn codes(&self) -> Vec<ErrorCode> {
        self.0.iter().map(|e| e.code).collect()
    }
}

/// One non-comment line split into fields with their columns.
struct Line<'a> {
    number: usize,
    text: &'a str,
    fields: Vec<(usize, &'a str)>,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, text)| {
        let mut fields = Vec::new();
        let mut start = None;
        for (col, (at, ch)) in text.char_indices().enumerate() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some((col, at)),
                (true, Some((c, s))) => {
                    fields.push((c + 1, &text[s..at]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some((c, s)) = start {
            fields.push((c + 1, &text[s..]));
        }
        match fields.first() {
            None => None,
            Some((_, "c")) => None,
            Some(_) => Some(Line { number: i + 1, text, fields }),
        }
    })
}

/// Error sink shared by the parsers.
#[derive(Default)]
struct Errors(Vec<ParseError>);

impl Errors {
    fn push(&mut self, line: usize, column: usize, code: ErrorCode, message: impl Into<String>) {
        self.0.push(ParseError { line, column, code, message: message.into() });
    }

    fn at(&mut self, line: &Line<'_>, field: usize, code: ErrorCode, message: impl Into<String>) {
        let column = line.fields.get(field).map_or(0, |f| f.0);
        self.push(line.number, column, code, message);
    }

    fn number(&mut self, line: &Line<'_>, field: usize, what: &str) -> Option<u64> {
        let Some(&(_, tok)) = line.fields.get(field) else {
            self.at(line, field, ErrorCode::Syntax, format!("missing {what}"));
            return None;
        };
        match tok.parse() {
            Ok(x) => Some(x),
            Err(_) => {
                self.at(line, field, ErrorCode::Number, format!("{what} must be a non-negative integer, found {tok:?}"));
                None
            }
        }
    }

    /// A 1-based id in `1..=max`, returned 0-based.
    fn index(&mut self, line: &Line<'_>, field: usize, what: &str, max: usize) -> Option<usize> {
        let x = self.number(line, field, what)?;
        if x == 0 || x > max as u64 {
            self.at(line, field, ErrorCode::Range, format!("{what} {x} is outside 1..={max}"));
            return None;
        }
        Some(x as usize - 1)
    }

    fn finish<T>(self, value: impl FnOnce() -> T) -> Result<T, ParseErrors> {
        if self.0.is_empty() {
            Ok(value())
        } else {
            Err(ParseErrors(self.0))
        }
    }
}

fn usize_of(x: u64) -> usize {
    usize::try_from(x).unwrap_or(usize::MAX)
}
