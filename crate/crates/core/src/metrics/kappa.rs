use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::MetricsError;
use crate::model::{Corpus, EntityType};

/// One entity label per word token, `none` outside entities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordLabelSequence(pub Vec<EntityType>);

impl WordLabelSequence {
    /// Word labels of every sentence, concatenated in corpus order.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        Self(
            corpus
                .sentences()
                .iter()
                .flat_map(|s| s.word_labels())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<EntityType>> for WordLabelSequence {
    fn from(v: Vec<EntityType>) -> Self {
        Self(v)
    }
}

/// Kappa over a token subset that may turn out to be empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Agreement {
    Defined(f64),
    /// No token qualified, so there is nothing to agree on.
    Undefined,
}

impl Agreement {
    pub fn value(self) -> Option<f64> {
        match self {
            Agreement::Defined(k) => Some(k),
            Agreement::Undefined => None,
        }
    }
}

impl Serialize for Agreement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.value().serialize(serializer)
    }
}

/// Kappa from label pairs, computed on integer counts so that hand examples
/// come out exact: `(N·agree − Σ a_c·b_c) / (N² − Σ a_c·b_c)`.
fn kappa_of_pairs<L: Ord, I: IntoIterator<Item = (L, L)>>(pairs: I) -> Option<f64> {
    let mut n: u128 = 0;
    let mut agree: u128 = 0;
    let mut margins: BTreeMap<L, (u128, u128)> = BTreeMap::new();
    for (x, y) in pairs {
        n += 1;
        if x == y {
            agree += 1;
        }
        margins.entry(x).or_default().0 += 1;
        margins.entry(y).or_default().1 += 1;
    }
    if n == 0 {
        return None;
    }
    let chance: u128 = margins.values().map(|(a, b)| a * b).sum();
    let denom = n * n - chance;
    if denom == 0 {
        // both annotators used one and the same label throughout
        return Some(1.0);
    }
    let num = (n * agree) as f64 - chance as f64;
    Some(num / denom as f64)
}

fn check_lengths(a: &WordLabelSequence, b: &WordLabelSequence) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Word-level Cohen's kappa over all tokens.
pub fn cohens_kappa(a: &WordLabelSequence, b: &WordLabelSequence) -> Result<f64, MetricsError> {
    check_lengths(a, b)?;
    kappa_of_pairs(a.0.iter().zip(&b.0).map(|(x, y)| (*x, *y))).ok_or(MetricsError::EmptySequence)
}

/// Kappa for one type over the tokens that either annotator labeled `t`,
/// with labels reduced to "is `t`" versus "is not `t`".
pub fn kappa_per_type(
    a: &WordLabelSequence,
    b: &WordLabelSequence,
    t: EntityType,
) -> Result<Agreement, MetricsError> {
    if t.is_none() {
        return Err(MetricsError::NoneType(t));
    }
    check_lengths(a, b)?;
    let pairs =
        a.0.iter()
            .zip(&b.0)
            .filter(|(x, y)| **x == t || **y == t)
            .map(|(x, y)| (*x == t, *y == t));
    Ok(kappa_of_pairs(pairs).map_or(Agreement::Undefined, Agreement::Defined))
}

/// Kappa over the tokens that at least one annotator placed inside an entity,
/// keeping the full label set.
pub fn kappa_only_entities(
    a: &WordLabelSequence,
    b: &WordLabelSequence,
) -> Result<Agreement, MetricsError> {
    check_lengths(a, b)?;
    let pairs =
        a.0.iter()
            .zip(&b.0)
            .filter(|(x, y)| !x.is_none() || !y.is_none())
            .map(|(x, y)| (*x, *y));
    Ok(kappa_of_pairs(pairs).map_or(Agreement::Undefined, Agreement::Defined))
}
