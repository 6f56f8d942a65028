use std::path::PathBuf;

use thiserror::Error;

use crate::model::{EntitySpan, EntityType, Violation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown entity type name {0:?}")]
    UnknownEntityType(String),
    #[error("span [{start},{end}) is empty")]
    EmptySpan { start: usize, end: usize },
    #[error("span [{start},{end}) may not have type none")]
    NoneTypedSpan { start: usize, end: usize },
    #[error("sentence {sentence_id} violates {} invariant(s)", violations.len())]
    InvalidSentence {
        sentence_id: String,
        violations: Vec<Violation>,
    },
    #[error("duplicate sentence id {0:?}")]
    DuplicateSentenceId(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("record {record} (line {line}): field `{field}`: {message}")]
    Schema {
        record: usize,
        line: usize,
        field: String,
        message: String,
    },
    #[error("cannot write corpus: {0}")]
    Write(#[source] std::io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IobesError {
    #[error("the tag space needs at least one entity type (the outside class)")]
    EmptyTypeSet,
    #[error("span {span} lies outside a sentence of length {len}")]
    OutOfBounds { span: EntitySpan, len: usize },
    #[error("spans {first} and {second} overlap")]
    Overlap {
        first: EntitySpan,
        second: EntitySpan,
    },
    #[error("span {0} has type none and cannot be tagged")]
    NoneTypedSpan(EntitySpan),
    #[error("invalid IOBES sequence at position {position}: {reason}")]
    InvalidSequence { position: usize, reason: String },
    #[error("unknown tag {0:?}")]
    UnknownTag(String),
    #[error("score matrix row {row} has {found} columns, expected {expected}")]
    RowWidth {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("score matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpanError {
    #[error("score {0} is outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("interval [{start},{end}) is empty")]
    EmptyInterval { start: usize, end: usize },
    #[error("scored spans may not have type none")]
    NoneType,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("the none type has no relations")]
    NoneType,
    #[error("unknown cardinality {0:?}")]
    UnknownCardinality(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("prediction refers to unknown sentence id {0:?}")]
    UnknownSentence(String),
    #[error("label sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("agreement over an empty sequence is undefined")]
    EmptySequence,
    #[error("per-type agreement needs a type other than none, got {0}")]
    NoneType(EntityType),
}
