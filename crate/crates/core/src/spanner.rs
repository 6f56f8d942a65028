//! Span enumeration and overlap filtering for span-classification models.

use std::cmp::Ordering;

use crate::error::SpanError;
use crate::model::{EntitySpan, EntityType, Interval};

/// Maximum span length used when none is configured.
pub const DEFAULT_MAX_SPAN_LEN: usize = 10;

/// A classified candidate span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSpan {
    pub span: Interval,
    pub etype: EntityType,
    pub score: f64,
}

impl ScoredSpan {
    pub fn new(start: usize, end: usize, etype: EntityType, score: f64) -> Result<Self, SpanError> {
        if start >= end {
            return Err(SpanError::EmptyInterval { start, end });
        }
        if etype.is_none() {
            return Err(SpanError::NoneType);
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(SpanError::ScoreOutOfRange(score));
        }
        Ok(Self {
            span: Interval::new(start, end),
            etype,
            score,
        })
    }

    pub fn entity(&self) -> EntitySpan {
        EntitySpan {
            start: self.span.start,
            end: self.span.end,
            etype: self.etype,
        }
    }
}

/// All intervals of length `1..=max_len` in a sentence of `sentence_len`
/// tokens, ordered by (length, start).
pub fn enumerate_spans(sentence_len: usize, max_len: usize) -> Vec<Interval> {
    let longest = max_len.min(sentence_len);
    let mut out = Vec::new();
    for k in 1..=longest {
        for a in 0..=sentence_len - k {
            out.push(Interval::new(a, a + k));
        }
    }
    out
}

/// Selection priority: higher score, then shorter, then earlier, then type order.
fn priority(a: &ScoredSpan, b: &ScoredSpan) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.span.len().cmp(&b.span.len()))
        .then(a.span.start.cmp(&b.span.start))
        .then(a.etype.cmp(&b.etype))
}

/// Greedy overlap removal: candidates are visited in priority order and kept
/// unless they overlap a span already kept. The result is sorted by start.
pub fn filter_overlaps(candidates: &[ScoredSpan]) -> Vec<ScoredSpan> {
    let mut order: Vec<ScoredSpan> = candidates.to_vec();
    order.sort_by(priority);
    let mut kept: Vec<ScoredSpan> = Vec::new();
    for c in order {
        if kept.iter().all(|k| !k.span.overlaps(&c.span)) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|s| s.span.start);
    kept
}
