//! Relation extraction scoring and annotator agreement.
//!
//! The adjusted metric gives a predicted relation fractional credit based on
//! how many tokens of each gold entity it recovers. For a prediction matched
//! to a gold relation with entities `i` and `j`, with `o` the token overlap and
//! `n` the entity sizes:
//!
//! ```text
//! tp = (o_i / n_i_gold + o_j / n_j_gold) / 2
//! fn = 1 - tp
//! fp = ((n_i_pred - o_i) / n_i_pred + (n_j_pred - o_j) / n_j_pred) / 2
//! ```
//!
//! How predictions pair up with gold relations is not implied by the formula.
//! Here it is an explicit one-to-one assignment inside each sentence that
//! maximizes total `tp`, restricted to predictions with the same entity-type
//! pair as the gold relation (see [`match_relations`]). Counts are summed over
//! the corpus before precision and recall are taken (micro averaging). Both
//! choices change the reported number and should be stated alongside it.
//!
//! All counts are exact rationals; conversion to `f64` happens only on output.

mod kappa;
mod matching;
mod report;

use std::fmt;
use std::ops::{Add, AddAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;

pub use kappa::{cohens_kappa, kappa_only_entities, kappa_per_type, Agreement, WordLabelSequence};
pub use matching::{match_relations, Assignment, MatchedPair};
pub use report::{
    score_corpus, score_sentence, ScoreAccumulator, ScoreReport, SentenceScore, TypeScores,
};

use crate::model::{EntitySpan, Relation};

pub type Rational = BigRational;

pub(crate) fn ratio(num: usize, den: usize) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Number of token indices shared by two spans, ignoring their types.
pub fn overlap(pred: &EntitySpan, gold: &EntitySpan) -> usize {
    pred.interval().intersection_len(&gold.interval())
}

/// Fractional true positives, false negatives and false positives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCounts {
    pub tp: Rational,
    pub fn_: Rational,
    pub fp: Rational,
}

impl RelationCounts {
    pub fn zero() -> Self {
        Self {
            tp: Rational::zero(),
            fn_: Rational::zero(),
            fp: Rational::zero(),
        }
    }

    /// Counts for an unmatched gold relation.
    pub fn missed() -> Self {
        Self {
            fn_: ratio(1, 1),
            ..Self::zero()
        }
    }

    /// Counts for an unmatched prediction.
    pub fn spurious() -> Self {
        Self {
            fp: ratio(1, 1),
            ..Self::zero()
        }
    }

    /// Counts for an exactly correct prediction.
    pub fn exact() -> Self {
        Self {
            tp: ratio(1, 1),
            ..Self::zero()
        }
    }
}

impl Default for RelationCounts {
    fn default() -> Self {
        Self::zero()
    }
}

impl AddAssign<&RelationCounts> for RelationCounts {
    fn add_assign(&mut self, rhs: &RelationCounts) {
        self.tp += &rhs.tp;
        self.fn_ += &rhs.fn_;
        self.fp += &rhs.fp;
    }
}

impl Add for RelationCounts {
    type Output = RelationCounts;

    fn add(mut self, rhs: RelationCounts) -> RelationCounts {
        self += &rhs;
        self
    }
}

impl Serialize for RelationCounts {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RelationCounts", 4)?;
        st.serialize_field("tp", &to_f64(&self.tp))?;
        st.serialize_field("fn", &to_f64(&self.fn_))?;
        st.serialize_field("fp", &to_f64(&self.fp))?;
        st.serialize_field(
            "exact",
            &[
                ("tp", self.tp.to_string()),
                ("fn", self.fn_.to_string()),
                ("fp", self.fp.to_string()),
            ]
            .into_iter()
            .collect::<std::collections::BTreeMap<_, _>>(),
        )?;
        st.end()
    }
}

/// Counts for one prediction scored against one gold relation with the same
/// type pair. Endpoints are paired by [`Relation::type_aligned`].
pub fn relation_counts(pred: &Relation, gold: &Relation) -> RelationCounts {
    let (pi, pj) = pred.type_aligned();
    let (gi, gj) = gold.type_aligned();
    let (oi, oj) = (overlap(&pi, &gi), overlap(&pj, &gj));
    let half = ratio(1, 2);

    let tp = &half * (ratio(oi, gi.len()) + ratio(oj, gj.len()));
    let fp = &half * (ratio(pi.len() - oi, pi.len()) + ratio(pj.len() - oj, pj.len()));
    let fn_ = ratio(1, 1) - &tp;
    RelationCounts { tp, fn_, fp }
}

/// Precision, recall and F1, each 0 when its denominator is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrfScores {
    pub precision: Rational,
    pub recall: Rational,
    pub f1: Rational,
}

impl PrfScores {
    pub fn precision_f64(&self) -> f64 {
        to_f64(&self.precision)
    }

    pub fn recall_f64(&self) -> f64 {
        to_f64(&self.recall)
    }

    pub fn f1_f64(&self) -> f64 {
        to_f64(&self.f1)
    }
}

impl fmt::Display for PrfScores {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={:.4} R={:.4} F1={:.4}",
            self.precision_f64(),
            self.recall_f64(),
            self.f1_f64()
        )
    }
}

impl Serialize for PrfScores {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PrfScores", 4)?;
        st.serialize_field("precision", &self.precision_f64())?;
        st.serialize_field("recall", &self.recall_f64())?;
        st.serialize_field("f1", &self.f1_f64())?;
        st.serialize_field(
            "exact",
            &[
                ("f1", self.f1.to_string()),
                ("precision", self.precision.to_string()),
                ("recall", self.recall.to_string()),
            ]
            .into_iter()
            .collect::<std::collections::BTreeMap<_, _>>(),
        )?;
        st.end()
    }
}

fn safe_div(num: &Rational, den: &Rational) -> Rational {
    if den.is_zero() {
        Rational::zero()
    } else {
        num / den
    }
}

pub fn prf(counts: &RelationCounts) -> PrfScores {
    let precision = safe_div(&counts.tp, &(&counts.tp + &counts.fp));
    let recall = safe_div(&counts.tp, &(&counts.tp + &counts.fn_));
    let two = ratio(2, 1);
    let f1 = safe_div(&(&two * &precision * &recall), &(&precision + &recall));
    PrfScores {
        precision,
        recall,
        f1,
    }
}
