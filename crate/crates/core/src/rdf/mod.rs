//! N-Triples and Turtle-subset serialization and parsing.

mod lex;
pub mod ntriples;
pub mod prefix;
pub mod turtle;

use std::fmt;

use thiserror::Error;

pub use ntriples::{parse_ntriples, serialize_ntriples, write_ntriples};
pub use prefix::PrefixMap;
pub use turtle::{parse_turtle_subset, serialize_turtle, TurtleParser};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("unknown prefix `{prefix}:` at line {line}, column {column}")]
    UnknownPrefixInDocument {
        prefix: String,
        line: usize,
        column: usize,
    },
}

impl RdfError {
    pub(crate) fn parse(pos: Position, reason: impl Into<String>) -> Self {
        RdfError::Parse {
            line: pos.line,
            column: pos.column,
            reason: reason.into(),
        }
    }

    pub fn line(&self) -> usize {
        match self {
            RdfError::Parse { line, .. } | RdfError::UnknownPrefixInDocument { line, .. } => *line,
        }
    }
}
