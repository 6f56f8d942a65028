//! JSON Lines records consumed by batch workflows: predictions, score
//! matrices, scored span candidates and bare token lists. One JSON object per
//! line; blank lines are skipped.

use serde::{Deserialize, Serialize};

use super::dataset::{entity_spans, relation_spans, schema_error, EntityRecord, RelationRecord};
use crate::error::IngestError;
use crate::iobes::ScoreMatrix;
use crate::model::{EntitySpan, EntityType, Relation};
use crate::spanner::ScoredSpan;

fn parse_line<T: for<'de> Deserialize<'de>>(
    line: &str,
    line_no: usize,
    record: usize,
) -> Result<T, IngestError> {
    let mut de = serde_json::Deserializer::from_str(line);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        if e.inner().is_syntax() || e.inner().is_eof() {
            let inner = e.into_inner();
            IngestError::Parse {
                line: line_no,
                column: inner.column(),
                message: inner.to_string(),
            }
        } else {
            schema_error(record, line_no, e)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub id: String,
    pub entities: Vec<EntitySpan>,
    pub relations: Vec<Relation>,
}

#[derive(Deserialize)]
struct PredictionRecord {
    id: String,
    entities: Vec<EntityRecord>,
    relations: Vec<RelationRecord>,
}

/// `{id, entities: [{start, end, type}], relations: [{head, tail}]}`
pub fn parse_prediction(
    line: &str,
    line_no: usize,
    record: usize,
) -> Result<Prediction, IngestError> {
    let rec: PredictionRecord = parse_line(line, line_no, record)?;
    let entities = entity_spans(record, line_no, &rec.entities)?;
    let relations = relation_spans(record, line_no, &entities, &rec.relations)?;
    Ok(Prediction {
        id: rec.id,
        entities,
        relations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub id: String,
    pub scores: ScoreMatrix,
}

#[derive(Deserialize)]
struct RawScoreRecord {
    id: String,
    scores: Vec<Vec<f64>>,
}

/// `{id, scores: [[f64; 49]; m]}` with columns in canonical tag order.
pub fn parse_score_record(
    line: &str,
    line_no: usize,
    record: usize,
) -> Result<ScoreRecord, IngestError> {
    let rec: RawScoreRecord = parse_line(line, line_no, record)?;
    let scores = ScoreMatrix::new(rec.scores).map_err(|e| IngestError::Schema {
        record,
        line: line_no,
        field: "scores".into(),
        message: e.to_string(),
    })?;
    Ok(ScoreRecord { id: rec.id, scores })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredSpanRecord {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub etype: EntityType,
    pub score: f64,
}

impl From<ScoredSpan> for ScoredSpanRecord {
    fn from(s: ScoredSpan) -> Self {
        Self {
            start: s.span.start,
            end: s.span.end,
            etype: s.etype,
            score: s.score,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRecord {
    pub id: String,
    pub spans: Vec<ScoredSpan>,
}

#[derive(Deserialize)]
struct RawCandidateRecord {
    id: String,
    spans: Vec<ScoredSpanRecord>,
}

/// `{id, spans: [{start, end, type, score}]}`
pub fn parse_candidates(
    line: &str,
    line_no: usize,
    record: usize,
) -> Result<CandidateRecord, IngestError> {
    let rec: RawCandidateRecord = parse_line(line, line_no, record)?;
    let spans = rec
        .spans
        .iter()
        .enumerate()
        .map(|(i, s)| {
            ScoredSpan::new(s.start, s.end, s.etype, s.score).map_err(|e| IngestError::Schema {
                record,
                line: line_no,
                field: format!("spans[{i}]"),
                message: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(CandidateRecord { id: rec.id, spans })
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct TokenRecord {
    pub id: String,
    pub tokens: Vec<String>,
}

/// `{id, tokens: [string]}`
pub fn parse_tokens(line: &str, line_no: usize, record: usize) -> Result<TokenRecord, IngestError> {
    parse_line(line, line_no, record)
}
