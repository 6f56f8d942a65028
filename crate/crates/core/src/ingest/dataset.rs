//! The canonical dataset file: a JSON array of sentence objects
//!
//! ```json
//! {"id": "...", "document": "...", "split": "train",
//!  "tokens": ["..."], "entities": [{"start": 0, "end": 2, "type": "kpi"}],
//!  "relations": [{"head": 0, "tail": 1}]}
//! ```
//!
//! `head` and `tail` index into `entities`. Spans are half-open token intervals.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::IngestError;
use crate::model::{AnnotatedSentence, Corpus, EntitySpan, EntityType, Relation, Split};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub etype: EntityType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationRecord {
    pub head: usize,
    pub tail: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub document: String,
    pub split: Split,
    pub tokens: Vec<String>,
    pub entities: Vec<EntityRecord>,
    pub relations: Vec<RelationRecord>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|b| **b == b'\n')
        .count()
        + 1
}

pub(crate) fn schema_error(
    record: usize,
    line: usize,
    err: serde_path_to_error::Error<serde_json::Error>,
) -> IngestError {
    let field = err.path().to_string();
    let inner = err.into_inner();
    IngestError::Schema {
        record,
        line: line + inner.line().saturating_sub(1),
        field,
        message: strip_position(&inner.to_string()),
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_owned(),
        None => message.to_owned(),
    }
}

/// Resolves entity records into spans, reporting the first bad entity.
pub(crate) fn entity_spans(
    record: usize,
    line: usize,
    entities: &[EntityRecord],
) -> Result<Vec<EntitySpan>, IngestError> {
    entities
        .iter()
        .enumerate()
        .map(|(i, e)| {
            EntitySpan::new(e.start, e.end, e.etype).map_err(|err| IngestError::Schema {
                record,
                line,
                field: format!("entities[{i}]"),
                message: err.to_string(),
            })
        })
        .collect()
}

/// Resolves relation records against already-resolved entity spans.
pub(crate) fn relation_spans(
    record: usize,
    line: usize,
    spans: &[EntitySpan],
    relations: &[RelationRecord],
) -> Result<Vec<Relation>, IngestError> {
    relations
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let lookup = |idx: usize, end: &str| {
                spans.get(idx).copied().ok_or_else(|| IngestError::Schema {
                    record,
                    line,
                    field: format!("relations[{i}].{end}"),
                    message: format!("entity index {idx} out of range ({} entities)", spans.len()),
                })
            };
            Ok(Relation::new(
                lookup(r.head, "head")?,
                lookup(r.tail, "tail")?,
            ))
        })
        .collect()
}

/// Parses the canonical JSON text. Sentence-level invariants are not enforced
/// here; run [`crate::model::validate_sentence`] for that.
pub fn parse_corpus(text: &str) -> Result<Corpus, IngestError> {
    let raw: Vec<&RawValue> = serde_json::from_str(text).map_err(|e| IngestError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;

    let mut sentences = Vec::with_capacity(raw.len());
    for (idx, item) in raw.iter().enumerate() {
        let offset = item.get().as_ptr() as usize - text.as_ptr() as usize;
        let line = line_of(text, offset);
        let mut de = serde_json::Deserializer::from_str(item.get());
        let rec: SentenceRecord =
            serde_path_to_error::deserialize(&mut de).map_err(|e| schema_error(idx, line, e))?;

        let spans = entity_spans(idx, line, &rec.entities)?;
        let relations = relation_spans(idx, line, &spans, &rec.relations)?;
        sentences.push((
            line,
            AnnotatedSentence::from_parts(
                rec.id,
                rec.document,
                rec.split,
                rec.tokens,
                spans,
                relations,
            ),
        ));
    }

    let mut seen = std::collections::BTreeSet::new();
    for (idx, (line, s)) in sentences.iter().enumerate() {
        if !seen.insert(s.sentence_id()) {
            return Err(IngestError::Schema {
                record: idx,
                line: *line,
                field: "id".into(),
                message: format!("duplicate sentence id {:?}", s.sentence_id()),
            });
        }
    }
    Ok(Corpus::new(sentences.into_iter().map(|(_, s)| s).collect())
        .expect("sentence ids checked above"))
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_corpus(&text)
}

/// The canonical record for one sentence: entities by start, relations by (head, tail).
pub fn sentence_record(s: &AnnotatedSentence) -> SentenceRecord {
    let entities = s.entities();
    let index_of = |span: EntitySpan| {
        entities
            .iter()
            .position(|e| *e == span)
            .expect("relation endpoints must be entities of the sentence")
    };
    let mut relations: Vec<RelationRecord> = s
        .relations()
        .iter()
        .map(|r| RelationRecord {
            head: index_of(r.head()),
            tail: index_of(r.tail()),
        })
        .collect();
    relations.sort();
    SentenceRecord {
        id: s.sentence_id().to_owned(),
        document: s.document_id().to_owned(),
        split: s.split(),
        tokens: s.tokens().iter().map(|t| t.text.clone()).collect(),
        entities: entities
            .iter()
            .map(|e| EntityRecord {
                start: e.start,
                end: e.end,
                etype: e.etype,
            })
            .collect(),
        relations,
    }
}

/// Serializes to the canonical, byte-stable form (two-space indentation).
///
/// Panics if a relation endpoint is not among the sentence's entities.
pub fn corpus_to_string(corpus: &Corpus) -> String {
    let records: Vec<SentenceRecord> = corpus.sentences().iter().map(sentence_record).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}

pub fn save_corpus(corpus: &Corpus, mut out: impl Write) -> Result<(), IngestError> {
    out.write_all(corpus_to_string(corpus).as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(IngestError::Write)
}
