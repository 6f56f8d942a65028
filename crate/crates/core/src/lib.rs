//! Data model, dataset handling and evaluation for KPI relation extraction
//! from annual-report sentences.
//!
//! - [`model`]: entity types, spans, relations, sentences and corpora.
//! - [`ingest`]: dataset JSON, JSON Lines records, monetary-value detection.
//! - [`iobes`]: IOBES tagging, the conditional label mask and greedy decoding.
//! - [`spanner`]: span enumeration and overlap filtering.
//! - [`relations`]: the allowed-relation matrix and cardinality checks.
//! - [`metrics`]: strict and adjusted relation scores, Cohen's kappa.

pub mod error;
pub mod ingest;
pub mod iobes;
pub mod metrics;
pub mod model;
pub mod relations;
pub mod spanner;

pub use error::{IngestError, IobesError, MetricsError, ModelError, RelationError, SpanError};
pub use model::{
    AnnotatedSentence, Corpus, CorpusStats, EntitySpan, EntityType, Interval, Relation, Split,
};
