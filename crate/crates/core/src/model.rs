//! Domain types shared by every other module: the entity-type registry,
//! token-level spans, relations and annotated sentences.
//!
//! Spans are half-open token intervals `[start, end)`. Relations are stored
//! with a fixed orientation (the entity that starts earlier is the head), so
//! two relations over the same pair of spans always compare equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::relations;

/// The closed set of annotation classes plus the outside class `none`.
///
/// Declaration order is the canonical order used for tag columns, tie-breaks
/// and report ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityType {
    Kpi,
    Cy,
    Py,
    Py1,
    Increase,
    IncreasePy,
    Decrease,
    DecreasePy,
    Thereof,
    Attr,
    KpiCoref,
    FalsePositive,
    None,
}

impl EntityType {
    /// All 13 members in canonical order, `none` last.
    pub const ALL: [EntityType; 13] = [
        EntityType::Kpi,
        EntityType::Cy,
        EntityType::Py,
        EntityType::Py1,
        EntityType::Increase,
        EntityType::IncreasePy,
        EntityType::Decrease,
        EntityType::DecreasePy,
        EntityType::Thereof,
        EntityType::Attr,
        EntityType::KpiCoref,
        EntityType::FalsePositive,
        EntityType::None,
    ];

    /// The 12 types that may be attached to a span.
    pub const ANNOTATED: [EntityType; 12] = [
        EntityType::Kpi,
        EntityType::Cy,
        EntityType::Py,
        EntityType::Py1,
        EntityType::Increase,
        EntityType::IncreasePy,
        EntityType::Decrease,
        EntityType::DecreasePy,
        EntityType::Thereof,
        EntityType::Attr,
        EntityType::KpiCoref,
        EntityType::FalsePositive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityType::Kpi => "kpi",
            EntityType::Cy => "cy",
            EntityType::Py => "py",
            EntityType::Py1 => "py1",
            EntityType::Increase => "increase",
            EntityType::IncreasePy => "increase-py",
            EntityType::Decrease => "decrease",
            EntityType::DecreasePy => "decrease-py",
            EntityType::Thereof => "thereof",
            EntityType::Attr => "attr",
            EntityType::KpiCoref => "kpi-coref",
            EntityType::FalsePositive => "false-positive",
            EntityType::None => "none",
        }
    }

    /// Position in [`EntityType::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_none(self) -> bool {
        self == EntityType::None
    }
}

/// Case-sensitive lookup of one of the 13 canonical names.
pub fn entity_type_from_name(name: &str) -> Result<EntityType, ModelError> {
    EntityType::ALL
        .iter()
        .copied()
        .find(|t| t.name() == name)
        .ok_or_else(|| ModelError::UnknownEntityType(name.to_owned()))
}

impl FromStr for EntityType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        entity_type_from_name(s)
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for EntityType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EntityType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        entity_type_from_name(&name).map_err(serde::de::Error::custom)
    }
}

/// A word-level token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub index: usize,
}

/// A half-open interval of token indices without a type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of token indices shared with `other`.
    pub fn intersection_len(&self, other: &Interval) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.intersection_len(other) > 0
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// A typed, contiguous token interval within one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub etype: EntityType,
}

impl EntitySpan {
    /// Checked constructor: requires `start < end` and a type other than `none`.
    /// Sentence bounds are checked by [`validate_sentence`].
    pub fn new(start: usize, end: usize, etype: EntityType) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::EmptySpan { start, end });
        }
        if etype.is_none() {
            return Err(ModelError::NoneTypedSpan { start, end });
        }
        Ok(Self { start, end, etype })
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.start, self.end)
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.interval().overlaps(&other.interval())
    }
}

impl fmt::Display for EntitySpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@[{},{})", self.etype, self.start, self.end)
    }
}

/// An unordered pair of entity spans, stored with the earlier-starting span as head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    head: EntitySpan,
    tail: EntitySpan,
}

impl Relation {
    pub fn new(a: EntitySpan, b: EntitySpan) -> Self {
        if (a.start, a.end, a.etype) <= (b.start, b.end, b.etype) {
            Self { head: a, tail: b }
        } else {
            Self { head: b, tail: a }
        }
    }

    pub fn head(&self) -> EntitySpan {
        self.head
    }

    pub fn tail(&self) -> EntitySpan {
        self.tail
    }

    /// Both endpoints ordered by (type, start, end). Two relations with the same
    /// type pair line up endpoint-for-endpoint in this order.
    pub fn type_aligned(&self) -> (EntitySpan, EntitySpan) {
        let key = |s: &EntitySpan| (s.etype, s.start, s.end);
        if key(&self.head) <= key(&self.tail) {
            (self.head, self.tail)
        } else {
            (self.tail, self.head)
        }
    }

    /// The unordered type pair in canonical type order.
    pub fn type_pair(&self) -> (EntityType, EntityType) {
        let (a, b) = self.type_aligned();
        (a.etype, b.etype)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.head, self.tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
    Unassigned,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Valid, Split::Test, Split::Unassigned];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sentence with its gold annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    sentence_id: String,
    document_id: String,
    split: Split,
    tokens: Vec<Token>,
    entities: Vec<EntitySpan>,
    relations: Vec<Relation>,
}

impl AnnotatedSentence {
    /// Builds a sentence and rejects it if [`validate_sentence`] reports anything.
    /// Entities are sorted by start and relations by (head, tail) first.
    pub fn new(
        sentence_id: impl Into<String>,
        document_id: impl Into<String>,
        split: Split,
        tokens: Vec<String>,
        entities: Vec<EntitySpan>,
        relations: Vec<Relation>,
    ) -> Result<Self, ModelError> {
        let sentence =
            Self::from_parts(sentence_id, document_id, split, tokens, entities, relations);
        let violations = validate_sentence(&sentence);
        if violations.is_empty() {
            Ok(sentence)
        } else {
            Err(ModelError::InvalidSentence {
                sentence_id: sentence.sentence_id,
                violations,
            })
        }
    }

    /// Assembles a sentence without checking invariants, so that malformed
    /// input can still be loaded and reported on.
    pub fn from_parts(
        sentence_id: impl Into<String>,
        document_id: impl Into<String>,
        split: Split,
        tokens: Vec<String>,
        mut entities: Vec<EntitySpan>,
        mut relations: Vec<Relation>,
    ) -> Self {
        entities.sort();
        relations.sort();
        let tokens = tokens
            .into_iter()
            .enumerate()
            .map(|(index, text)| Token { text, index })
            .collect();
        Self {
            sentence_id: sentence_id.into(),
            document_id: document_id.into(),
            split,
            tokens,
            entities,
            relations,
        }
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn document_id(&self) -> &str {
        &self.document_id
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token_texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn entities(&self) -> &[EntitySpan] {
        &self.entities
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Word-level label sequence (one label per token, `none` outside entities).
    pub fn word_labels(&self) -> Vec<EntityType> {
        let mut labels = vec![EntityType::None; self.tokens.len()];
        for e in &self.entities {
            for label in labels.iter_mut().take(e.end).skip(e.start) {
                *label = e.etype;
            }
        }
        labels
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    EmptyToken,
    EmptySpan,
    NoneTypedSpan,
    SpanOutOfBounds,
    Overlap,
    UnsortedEntities,
    DanglingEndpoint,
    ForbiddenRelation,
    Cardinality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.rule, self.detail)
    }
}

/// Checks every sentence-level invariant. An empty result means the sentence is valid.
pub fn validate_sentence(s: &AnnotatedSentence) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.tokens.len();

    for t in &s.tokens {
        if t.text.is_empty() {
            out.push(Violation {
                rule: Rule::EmptyToken,
                detail: format!("token {} is empty", t.index),
            });
        }
    }

    for e in &s.entities {
        if e.start >= e.end {
            out.push(Violation {
                rule: Rule::EmptySpan,
                detail: format!("span {e} is empty"),
            });
        }
        if e.etype.is_none() {
            out.push(Violation {
                rule: Rule::NoneTypedSpan,
                detail: format!("span {e} has type none"),
            });
        }
        if e.end > n {
            out.push(Violation {
                rule: Rule::SpanOutOfBounds,
                detail: format!("span {e} exceeds sentence length {n}"),
            });
        }
    }

    for w in s.entities.windows(2) {
        if w[0].start > w[1].start {
            out.push(Violation {
                rule: Rule::UnsortedEntities,
                detail: format!("{} listed before {}", w[0], w[1]),
            });
        }
    }

    for (i, a) in s.entities.iter().enumerate() {
        for b in &s.entities[i + 1..] {
            let shared = a.interval().intersection_len(&b.interval());
            if shared > 0 {
                let first = a.start.max(b.start);
                out.push(Violation {
                    rule: Rule::Overlap,
                    detail: format!("{a} and {b} share token {first}"),
                });
            }
        }
    }

    for r in &s.relations {
        for endpoint in [r.head(), r.tail()] {
            if !s.entities.contains(&endpoint) {
                out.push(Violation {
                    rule: Rule::DanglingEndpoint,
                    detail: format!("relation {r} refers to {endpoint}, which is not an entity"),
                });
            }
        }
        let (a, b) = (r.head().etype, r.tail().etype);
        if !a.is_none() && !b.is_none() && !relations::is_allowed(a, b) {
            out.push(Violation {
                rule: Rule::ForbiddenRelation,
                detail: format!("relation {r} links {a} and {b}, which may not be related"),
            });
        }
    }

    out
}

/// A collection of annotated sentences with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<AnnotatedSentence>,
    documents: BTreeSet<String>,
}

impl Corpus {
    pub fn new(sentences: Vec<AnnotatedSentence>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for s in &sentences {
            if !seen.insert(s.sentence_id.as_str()) {
                return Err(ModelError::DuplicateSentenceId(s.sentence_id.clone()));
            }
        }
        let documents = sentences.iter().map(|s| s.document_id.clone()).collect();
        Ok(Self {
            sentences,
            documents,
        })
    }

    pub fn sentences(&self) -> &[AnnotatedSentence] {
        &self.sentences
    }

    pub fn documents(&self) -> &BTreeSet<String> {
        &self.documents
    }

    pub fn get(&self, sentence_id: &str) -> Option<&AnnotatedSentence> {
        self.sentences.iter().find(|s| s.sentence_id == sentence_id)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn into_sentences(self) -> Vec<AnnotatedSentence> {
        self.sentences
    }
}

/// Exact counts over a corpus. `per_type` never contains `none`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub sentences: usize,
    pub entities: usize,
    pub relations: usize,
    pub per_type: BTreeMap<EntityType, usize>,
    pub per_split: BTreeMap<Split, usize>,
}

impl Add for CorpusStats {
    type Output = CorpusStats;

    fn add(mut self, rhs: CorpusStats) -> CorpusStats {
        self.sentences += rhs.sentences;
        self.entities += rhs.entities;
        self.relations += rhs.relations;
        for (k, v) in rhs.per_type {
            *self.per_type.entry(k).or_default() += v;
        }
        for (k, v) in rhs.per_split {
            *self.per_split.entry(k).or_default() += v;
        }
        self
    }
}

impl Serialize for Split {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for s in corpus.sentences() {
        stats.sentences += 1;
        *stats.per_split.entry(s.split()).or_default() += 1;
        stats.relations += s.relations().len();
        for e in s.entities() {
            if e.etype.is_none() {
                continue;
            }
            stats.entities += 1;
            *stats.per_type.entry(e.etype).or_default() += 1;
        }
    }
    stats
}
