//! The allowed-relation matrix between entity types, candidate pair
//! generation and per-sentence cardinality checks.
//!
//! `cardinality(a, b)` is read from `a`'s side: `1:n` means one `a` may link
//! to many `b` entities, `n:1` and `1:1` mean one `a` links to at most one `b`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::RelationError;
use crate::model::{EntitySpan, EntityType, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    OneToOne,
    OneToMany,
    ManyToOne,
    Forbidden,
}

impl Cardinality {
    pub fn symbol(self) -> &'static str {
        match self {
            Cardinality::OneToOne => "1:1",
            Cardinality::OneToMany => "1:n",
            Cardinality::ManyToOne => "n:1",
            Cardinality::Forbidden => "-",
        }
    }

    pub fn from_symbol(symbol: &str) -> Result<Self, RelationError> {
        match symbol {
            "1:1" => Ok(Cardinality::OneToOne),
            "1:n" => Ok(Cardinality::OneToMany),
            "n:1" => Ok(Cardinality::ManyToOne),
            "-" => Ok(Cardinality::Forbidden),
            other => Err(RelationError::UnknownCardinality(other.to_owned())),
        }
    }

    /// The same constraint seen from the other entity.
    pub fn transpose(self) -> Self {
        match self {
            Cardinality::OneToMany => Cardinality::ManyToOne,
            Cardinality::ManyToOne => Cardinality::OneToMany,
            other => other,
        }
    }

    /// Whether an entity on the left may link to at most one entity of the right type.
    pub fn limits_left(self) -> bool {
        matches!(self, Cardinality::OneToOne | Cardinality::ManyToOne)
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Cardinality {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

use Cardinality::{Forbidden as F, ManyToOne as N1, OneToMany as ON, OneToOne as O1};

// Rows and columns follow `EntityType::ANNOTATED`:
// kpi cy py py1 increase increase-py decrease decrease-py thereof attr kpi-coref false-positive
const MATRIX: [[Cardinality; 12]; 12] = [
    /* kpi            */ [F, O1, O1, O1, O1, O1, O1, O1, ON, ON, F, F],
    /* cy             */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* py             */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* py1            */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* increase       */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* increase-py    */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* decrease       */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* decrease-py    */ [O1, F, F, F, F, F, F, F, O1, F, O1, F],
    /* thereof        */ [N1, O1, O1, O1, O1, O1, O1, O1, F, F, N1, F],
    /* attr           */ [N1, F, F, F, F, F, F, F, F, F, N1, F],
    /* kpi-coref      */ [F, O1, O1, O1, O1, O1, O1, O1, ON, ON, F, F],
    /* false-positive */ [F, F, F, F, F, F, F, F, F, F, F, F],
];

/// Constant-time lookup in the built-in matrix.
pub fn cardinality(a: EntityType, b: EntityType) -> Result<Cardinality, RelationError> {
    if a.is_none() || b.is_none() {
        return Err(RelationError::NoneType);
    }
    Ok(MATRIX[a.index()][b.index()])
}

/// `false` for any pair involving `none`.
pub fn is_allowed(a: EntityType, b: EntityType) -> bool {
    matches!(cardinality(a, b), Ok(c) if c != Cardinality::Forbidden)
}

/// Every allowed unordered pair once, oriented with the earlier-starting entity first.
/// Pairs are ordered by the positions of both entities in start order.
pub fn candidate_pairs(entities: &[EntitySpan]) -> Vec<(EntitySpan, EntitySpan)> {
    let mut sorted: Vec<EntitySpan> = entities.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if is_allowed(a.etype, b.etype) {
                out.push((*a, *b));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardinalityViolation {
    pub entity: String,
    pub partner_type: EntityType,
    pub cardinality: Cardinality,
    pub partners: Vec<String>,
}

impl fmt::Display for CardinalityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} is linked to {} entities of type {} ({}): {}",
            self.entity,
            self.partners.len(),
            self.partner_type,
            self.cardinality,
            self.partners.join(", ")
        )
    }
}

/// Flags every entity that links to two or more distinct entities of a partner
/// type it may only link to once. Forbidden pairs are ignored here.
pub fn validate_cardinality(relations: &[Relation]) -> Vec<CardinalityViolation> {
    let mut partners: BTreeMap<(EntitySpan, EntityType), BTreeSet<EntitySpan>> = BTreeMap::new();
    for r in relations {
        for (me, other) in [(r.head(), r.tail()), (r.tail(), r.head())] {
            partners.entry((me, other.etype)).or_default().insert(other);
        }
    }

    partners
        .into_iter()
        .filter_map(|((me, partner_type), linked)| {
            let card = cardinality(me.etype, partner_type).ok()?;
            (card.limits_left() && linked.len() >= 2).then(|| CardinalityViolation {
                entity: me.to_string(),
                partner_type,
                cardinality: card,
                partners: linked.iter().map(ToString::to_string).collect(),
            })
        })
        .collect()
}

/// The matrix as `{row: {column: symbol}}` in canonical type order.
pub fn constraint_table() -> Vec<(EntityType, Vec<(EntityType, Cardinality)>)> {
    EntityType::ANNOTATED
        .iter()
        .map(|&a| {
            let row = EntityType::ANNOTATED
                .iter()
                .map(|&b| (b, MATRIX[a.index()][b.index()]))
                .collect();
            (a, row)
        })
        .collect()
}

/// JSON export of [`constraint_table`], keys in canonical order.
pub fn constraints_json() -> serde_json::Value {
    let mut rows = serde_json::Map::new();
    for (a, row) in constraint_table() {
        let mut cols = serde_json::Map::new();
        for (b, c) in row {
            cols.insert(b.name().to_owned(), serde_json::Value::from(c.symbol()));
        }
        rows.insert(a.name().to_owned(), serde_json::Value::Object(cols));
    }
    serde_json::Value::Object(rows)
}
