//! On-disk formats: signature and grammar JSON, CSV / JSON-lines traces,
//! frame label files.

pub mod grammar;
pub mod labels;
pub mod signatures;
pub mod trace;

use std::fmt;

/// Where in a document an error was found.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Location {
    pub line: Option<usize>,
    pub field: Option<String>,
}

impl Location {
    pub fn line(line: usize) -> Self {
        Self { line: Some(line), field: None }
    }

    pub fn field(field: impl Into<String>) -> Self {
        Self { line: None, field: Some(field.into()) }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), Some(n)) => write!(f, "line {l}, field `{n}`"),
            (Some(l), None) => write!(f, "line {l}"),
            (None, Some(n)) => write!(f, "field `{n}`"),
            (None, None) => f.write_str("document"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("parse error at {at}: {message}")]
    Parse { at: Location, message: String },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{label}`, attribute `{attribute}`: unknown pattern code {code}")]
    UnknownPatternCode { label: String, attribute: String, code: String },
    #[error("malformed row at line {line}: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("line {line}: frame {frame} does not follow the previous frame")]
    NonMonotonicFrames { line: usize, frame: u64 },
    #[error("line {line}: probability {value} for `{attribute}` is outside [0, 1]")]
    OutOfRangeProbability { line: usize, attribute: String, value: f64 },
    #[error("{at}: {source}")]
    Invalid { at: Location, source: dynsig_core::Error },
}

impl FormatError {
    pub(crate) fn parse(at: Location, message: impl Into<String>) -> Self {
        Self::Parse { at, message: message.into() }
    }

    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        Self::parse(Location { line: Some(e.line()), field: None }, e.to_string())
    }
}
