//! IOBES tagging: the tag space, the span/tag codec, the conditional label
//! mask and greedy decoding of per-token score matrices under that mask.
//!
//! Canonical tag order (the column order of every [`ScoreMatrix`]) is `O`
//! followed by `B-t, I-t, E-t, S-t` for each annotated type `t` in registry
//! order, which gives `4 * 12 + 1 = 49` columns.

use std::fmt;
use std::str::FromStr;

use crate::error::IobesError;
use crate::model::{entity_type_from_name, EntitySpan, EntityType};

/// Number of tags in the canonical tag space.
pub const TAG_COUNT: usize = 4 * EntityType::ANNOTATED.len() + 1;

/// Size of the IOBES tag space for `num_types` entity types, counting `none`.
pub fn tag_count(num_types: usize) -> Result<usize, IobesError> {
    if num_types == 0 {
        return Err(IobesError::EmptyTypeSet);
    }
    Ok(4 * (num_types - 1) + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prefix {
    B,
    I,
    E,
    S,
    O,
}

impl Prefix {
    fn letter(self) -> char {
        match self {
            Prefix::B => 'B',
            Prefix::I => 'I',
            Prefix::E => 'E',
            Prefix::S => 'S',
            Prefix::O => 'O',
        }
    }
}

/// A prefix plus entity type; the type is `none` exactly when the prefix is `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IobesTag {
    prefix: Prefix,
    etype: EntityType,
}

impl IobesTag {
    pub const OUTSIDE: IobesTag = IobesTag {
        prefix: Prefix::O,
        etype: EntityType::None,
    };

    /// `None` when the prefix/type combination is not a tag (`O` with a type,
    /// or `B/I/E/S` with `none`).
    pub fn new(prefix: Prefix, etype: EntityType) -> Option<Self> {
        ((prefix == Prefix::O) == etype.is_none()).then_some(Self { prefix, etype })
    }

    pub fn begin(etype: EntityType) -> Self {
        Self::new(Prefix::B, etype).expect("B- tag needs an entity type")
    }

    pub fn inside(etype: EntityType) -> Self {
        Self::new(Prefix::I, etype).expect("I- tag needs an entity type")
    }

    pub fn end(etype: EntityType) -> Self {
        Self::new(Prefix::E, etype).expect("E- tag needs an entity type")
    }

    pub fn single(etype: EntityType) -> Self {
        Self::new(Prefix::S, etype).expect("S- tag needs an entity type")
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn etype(&self) -> EntityType {
        self.etype
    }

    /// Column of this tag in the canonical order.
    pub fn index(&self) -> usize {
        let offset = match self.prefix {
            Prefix::O => return 0,
            Prefix::B => 1,
            Prefix::I => 2,
            Prefix::E => 3,
            Prefix::S => 4,
        };
        4 * self.etype.index() + offset
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index == 0 {
            return Some(Self::OUTSIDE);
        }
        if index >= TAG_COUNT {
            return None;
        }
        let etype = EntityType::ANNOTATED[(index - 1) / 4];
        let prefix = [Prefix::B, Prefix::I, Prefix::E, Prefix::S][(index - 1) % 4];
        Some(Self { prefix, etype })
    }

    /// Legal as the final tag of a sentence.
    pub fn can_end(&self) -> bool {
        matches!(self.prefix, Prefix::O | Prefix::E | Prefix::S)
    }
}

impl fmt::Display for IobesTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prefix {
            Prefix::O => f.write_str("O"),
            p => write!(f, "{}-{}", p.letter(), self.etype),
        }
    }
}

impl FromStr for IobesTag {
    type Err = IobesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(Self::OUTSIDE);
        }
        let unknown = || IobesError::UnknownTag(s.to_owned());
        let (p, name) = s.split_once('-').ok_or_else(unknown)?;
        let prefix = match p {
            "B" => Prefix::B,
            "I" => Prefix::I,
            "E" => Prefix::E,
            "S" => Prefix::S,
            _ => return Err(unknown()),
        };
        let etype = entity_type_from_name(name).map_err(|_| unknown())?;
        Self::new(prefix, etype).ok_or_else(unknown)
    }
}

/// Every tag in canonical order.
pub fn all_tags() -> Vec<IobesTag> {
    (0..TAG_COUNT)
        .map(|i| IobesTag::from_index(i).expect("index below TAG_COUNT"))
        .collect()
}

/// Tag sequence for a sentence of `sentence_len` tokens carrying `spans`.
pub fn encode(sentence_len: usize, spans: &[EntitySpan]) -> Result<Vec<IobesTag>, IobesError> {
    let mut sorted = spans.to_vec();
    sorted.sort();
    for s in &sorted {
        if s.start >= s.end || s.end > sentence_len {
            return Err(IobesError::OutOfBounds {
                span: *s,
                len: sentence_len,
            });
        }
        if s.etype.is_none() {
            return Err(IobesError::NoneTypedSpan(*s));
        }
    }
    for w in sorted.windows(2) {
        if w[0].overlaps(&w[1]) {
            return Err(IobesError::Overlap {
                first: w[0],
                second: w[1],
            });
        }
    }

    let mut tags = vec![IobesTag::OUTSIDE; sentence_len];
    for s in &sorted {
        if s.len() == 1 {
            tags[s.start] = IobesTag::single(s.etype);
            continue;
        }
        tags[s.start] = IobesTag::begin(s.etype);
        for tag in &mut tags[s.start + 1..s.end - 1] {
            *tag = IobesTag::inside(s.etype);
        }
        tags[s.end - 1] = IobesTag::end(s.etype);
    }
    Ok(tags)
}

/// Inverse of [`encode`]; rejects anything that is not a well-formed IOBES sequence.
pub fn decode(tags: &[IobesTag]) -> Result<Vec<EntitySpan>, IobesError> {
    let invalid =
        |position: usize, reason: String| IobesError::InvalidSequence { position, reason };
    let mut spans = Vec::new();
    let mut open: Option<(usize, EntityType)> = None;

    for (j, tag) in tags.iter().enumerate() {
        match (open, tag.prefix) {
            (None, Prefix::O) => {}
            (None, Prefix::S) => spans.push(EntitySpan {
                start: j,
                end: j + 1,
                etype: tag.etype,
            }),
            (None, Prefix::B) => open = Some((j, tag.etype)),
            (None, Prefix::I | Prefix::E) => {
                return Err(invalid(
                    j,
                    format!("{tag} without a preceding B-{}", tag.etype),
                ));
            }
            (Some((_, t)), Prefix::I) if t == tag.etype => {}
            (Some((start, t)), Prefix::E) if t == tag.etype => {
                spans.push(EntitySpan {
                    start,
                    end: j + 1,
                    etype: t,
                });
                open = None;
            }
            (Some((start, t)), _) => {
                return Err(invalid(
                    j,
                    format!("{tag} inside the {t} entity opened at {start}"),
                ));
            }
        }
    }
    if let Some((start, t)) = open {
        return Err(invalid(
            tags.len(),
            format!("{t} entity opened at {start} is never closed"),
        ));
    }
    Ok(spans)
}

/// Boolean mask over the canonical tag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagMask {
    allowed: [bool; TAG_COUNT],
}

impl TagMask {
    pub fn is_allowed(&self, tag: IobesTag) -> bool {
        self.allowed[tag.index()]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.allowed
    }

    pub fn allowed_tags(&self) -> impl Iterator<Item = IobesTag> + '_ {
        self.allowed
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .filter_map(|(i, _)| IobesTag::from_index(i))
    }

    pub fn count(&self) -> usize {
        self.allowed.iter().filter(|a| **a).count()
    }

    /// Drops every tag that cannot close a sentence.
    pub fn restrict_to_end(mut self) -> Self {
        for (i, a) in self.allowed.iter_mut().enumerate() {
            if let Some(tag) = IobesTag::from_index(i) {
                *a &= tag.can_end();
            }
        }
        self
    }
}

/// Tags that may follow `prev`; `None` stands for the start of the sentence.
pub fn allowed_next(prev: Option<IobesTag>) -> TagMask {
    let mut allowed = [false; TAG_COUNT];
    match prev {
        Some(p) if matches!(p.prefix, Prefix::B | Prefix::I) => {
            allowed[IobesTag::inside(p.etype).index()] = true;
            allowed[IobesTag::end(p.etype).index()] = true;
        }
        _ => {
            allowed[0] = true;
            for t in EntityType::ANNOTATED {
                allowed[IobesTag::begin(t).index()] = true;
                allowed[IobesTag::single(t).index()] = true;
            }
        }
    }
    TagMask { allowed }
}

/// Per-token scores over the canonical tag order, higher meaning more likely.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    rows: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, IobesError> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != TAG_COUNT {
                return Err(IobesError::RowWidth {
                    row: r,
                    found: row.len(),
                    expected: TAG_COUNT,
                });
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(IobesError::NonFinite { row: r, col: c });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Left-to-right argmax under [`allowed_next`], with the last position also
/// restricted to tags that close the sentence. Ties go to the lowest column.
pub fn masked_greedy_decode(scores: &ScoreMatrix) -> Vec<IobesTag> {
    let m = scores.len();
    let mut out = Vec::with_capacity(m);
    let mut prev = None;
    for (j, row) in scores.rows.iter().enumerate() {
        let mut mask = allowed_next(prev);
        if j + 1 == m {
            mask = mask.restrict_to_end();
        }
        let mut best: Option<usize> = None;
        for (i, &ok) in mask.allowed.iter().enumerate() {
            if ok && best.is_none_or(|b| row[i] > row[b]) {
                best = Some(i);
            }
        }
        let tag = IobesTag::from_index(best.expect("every mask allows at least one tag"))
            .expect("mask index in range");
        out.push(tag);
        prev = Some(tag);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use EntityType::*;

    fn span(start: usize, end: usize, t: EntityType) -> EntitySpan {
        EntitySpan::new(start, end, t).unwrap()
    }

    const O: IobesTag = IobesTag::OUTSIDE;

    #[test]
    fn tag_space_size() {
        assert_eq!(tag_count(13).unwrap(), 49);
        assert_eq!(tag_count(1).unwrap(), 1);
        assert_eq!(tag_count(3).unwrap(), 9);
        assert_eq!(tag_count(0), Err(IobesError::EmptyTypeSet));
        assert_eq!(TAG_COUNT, tag_count(EntityType::ALL.len()).unwrap());
    }

    #[test]
    fn canonical_order() {
        let tags = all_tags();
        assert_eq!(tags.len(), 49);
        assert_eq!(tags[0], O);
        assert_eq!(tags[1], IobesTag::begin(Kpi));
        assert_eq!(tags[4], IobesTag::single(Kpi));
        assert_eq!(tags[5], IobesTag::begin(Cy));
        assert_eq!(tags[48], IobesTag::single(FalsePositive));
        for (i, t) in tags.iter().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(t.to_string().parse::<IobesTag>().unwrap(), *t);
        }
        assert!(IobesTag::new(Prefix::O, Kpi).is_none());
        assert!(IobesTag::new(Prefix::B, None).is_none());
        assert!("B-none".parse::<IobesTag>().is_err());
        assert!("X-kpi".parse::<IobesTag>().is_err());
    }

    #[test]
    fn encode_examples() {
        assert_eq!(
            encode(5, &[span(1, 2, Kpi)]).unwrap(),
            vec![O, IobesTag::single(Kpi), O, O, O]
        );
        assert_eq!(
            encode(5, &[span(0, 3, Cy)]).unwrap(),
            vec![
                IobesTag::begin(Cy),
                IobesTag::inside(Cy),
                IobesTag::end(Cy),
                O,
                O
            ]
        );
        assert_eq!(
            encode(3, &[span(0, 1, Kpi), span(1, 3, Py)]).unwrap(),
            vec![
                IobesTag::single(Kpi),
                IobesTag::begin(Py),
                IobesTag::end(Py)
            ]
        );
    }

    #[test]
    fn encode_errors_name_the_span() {
        let err = encode(3, &[span(2, 4, Kpi)]).unwrap_err();
        assert_eq!(
            err,
            IobesError::OutOfBounds {
                span: span(2, 4, Kpi),
                len: 3
            }
        );
        let err = encode(5, &[span(0, 2, Kpi), span(1, 3, Cy)]).unwrap_err();
        assert!(matches!(err, IobesError::Overlap { .. }));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(
            decode(&[O, IobesTag::single(Kpi), O, O, O]).unwrap(),
            vec![span(1, 2, Kpi)]
        );
        assert_eq!(
            decode(&[
                IobesTag::begin(Cy),
                IobesTag::inside(Cy),
                IobesTag::end(Cy),
                O,
                O
            ])
            .unwrap(),
            vec![span(0, 3, Cy)]
        );
        assert!(matches!(
            decode(&[IobesTag::inside(Kpi), O]),
            Err(IobesError::InvalidSequence { position: 0, .. })
        ));
    }

    #[test]
    fn decode_rejects_type_switch_and_unclosed() {
        let seq = [IobesTag::begin(Kpi), IobesTag::end(Cy)];
        assert!(matches!(
            decode(&seq),
            Err(IobesError::InvalidSequence { position: 1, .. })
        ));
        let seq = [O, IobesTag::begin(Kpi), IobesTag::inside(Kpi)];
        assert!(matches!(
            decode(&seq),
            Err(IobesError::InvalidSequence { position: 3, .. })
        ));
        assert!(decode(&[]).unwrap().is_empty());
    }

    #[test]
    fn masks() {
        let after_b = allowed_next(Some(IobesTag::begin(Kpi)));
        let tags: Vec<IobesTag> = after_b.allowed_tags().collect();
        assert_eq!(tags, vec![IobesTag::inside(Kpi), IobesTag::end(Kpi)]);

        let start = allowed_next(Option::None);
        assert_eq!(start.count(), 25);
        for t in EntityType::ANNOTATED {
            assert!(start.is_allowed(IobesTag::begin(t)));
            assert!(start.is_allowed(IobesTag::single(t)));
            assert!(!start.is_allowed(IobesTag::inside(t)));
            assert!(!start.is_allowed(IobesTag::end(t)));
        }
        assert_eq!(allowed_next(Some(O)), start);
        assert_eq!(allowed_next(Some(IobesTag::end(Cy))), start);
        assert_eq!(allowed_next(Some(IobesTag::single(Cy))), start);
        assert_eq!(
            allowed_next(Some(IobesTag::inside(Attr))),
            allowed_next(Some(IobesTag::begin(Attr)))
        );
    }

    fn row_with(peak: IobesTag, second: Option<IobesTag>) -> Vec<f64> {
        let mut row = vec![0.0; TAG_COUNT];
        row[peak.index()] = 5.0;
        if let Some(s) = second {
            row[s.index()] = 2.0;
        }
        row
    }

    #[test]
    fn greedy_single_row() {
        let m = ScoreMatrix::new(vec![row_with(IobesTag::single(Kpi), Option::None)]).unwrap();
        assert_eq!(masked_greedy_decode(&m), vec![IobesTag::single(Kpi)]);
    }

    #[test]
    fn greedy_respects_previous_tag() {
        // Row 1 prefers B-cy globally, but after B-kpi only I-kpi/E-kpi are legal.
        let m = ScoreMatrix::new(vec![
            row_with(IobesTag::begin(Kpi), Option::None),
            row_with(IobesTag::begin(Cy), Some(IobesTag::inside(Kpi))),
        ])
        .unwrap();
        // I-kpi scores higher, but the last row must close the entity.
        assert_eq!(
            masked_greedy_decode(&m),
            vec![IobesTag::begin(Kpi), IobesTag::end(Kpi)]
        );

        let mut rows = vec![
            row_with(IobesTag::begin(Kpi), Option::None),
            row_with(IobesTag::begin(Cy), Some(IobesTag::inside(Kpi))),
            vec![0.0; TAG_COUNT],
        ];
        rows[2][IobesTag::end(Kpi).index()] = 1.0;
        let m = ScoreMatrix::new(rows).unwrap();
        assert_eq!(
            masked_greedy_decode(&m),
            vec![
                IobesTag::begin(Kpi),
                IobesTag::inside(Kpi),
                IobesTag::end(Kpi)
            ]
        );
    }

    #[test]
    fn ties_break_to_lowest_column() {
        let m = ScoreMatrix::new(vec![vec![1.0; TAG_COUNT]; 3]).unwrap();
        assert_eq!(masked_greedy_decode(&m), vec![O, O, O]);
    }

    #[test]
    fn score_matrix_validation() {
        assert!(matches!(
            ScoreMatrix::new(vec![vec![0.0; 3]]),
            Err(IobesError::RowWidth {
                row: 0,
                found: 3,
                ..
            })
        ));
        let mut row = vec![0.0; TAG_COUNT];
        row[7] = f64::NAN;
        assert_eq!(
            ScoreMatrix::new(vec![row]),
            Err(IobesError::NonFinite { row: 0, col: 7 })
        );
        assert!(masked_greedy_decode(&ScoreMatrix::new(vec![]).unwrap()).is_empty());
    }
}
