use std::fmt;

use thiserror::Error;

/// A token that is not a member of one of the closed vocabularies.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} {token:?}")]
pub struct UnknownToken {
    pub what: &'static str,
    pub token: String,
}

impl UnknownToken {
    pub(crate) fn new(what: &'static str, token: &str) -> Self {
        UnknownToken {
            what,
            token: token.to_owned(),
        }
    }
}

/// Classification of a document-level schema error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaErrorKind {
    /// Not well-formed JSON.
    Syntax,
    /// Missing, extra, or mistyped field.
    Structure,
    UnknownKind,
    UnknownCategory,
    BadTimestamp,
}

impl SchemaErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            SchemaErrorKind::Syntax => "SYNTAX",
            SchemaErrorKind::Structure => "SCHEMA",
            SchemaErrorKind::UnknownKind => "UNKNOWN_KIND",
            SchemaErrorKind::UnknownCategory => "UNKNOWN_CATEGORY",
            SchemaErrorKind::BadTimestamp => "BAD_TIMESTAMP",
        }
    }
}

/// A document failed to parse; `path` locates the offending value
/// (for example `steps[0].kind`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SchemaError {
    pub kind: SchemaErrorKind,
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}: {}", self.kind.code(), self.message)
        } else {
            write!(f, "{} at {}: {}", self.kind.code(), self.path, self.message)
        }
    }
}

/// Errors raised while reading or assembling datasets.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {source}")]
    Line { line: usize, source: SchemaError },
    #[error("duplicate trace id {0:?}")]
    DuplicateId(String),
    #[error("categories file: {0}")]
    Categories(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors raised by model construction and model import.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("cannot build a model from an empty trace list")]
    NoTraces,
    #[error("traces span several categories ({0} and {1})")]
    MixedCategories(String, String),
    #[error("smoothing pseudo-count must be finite and non-negative, got {0}")]
    BadAlpha(f64),
    #[error("invalid model document: {0}")]
    BadDocument(String),
    #[error("invalid alignment costs: {0}")]
    BadCosts(String),
    #[error("invalid emission parameters: {0}")]
    BadEmission(String),
}
