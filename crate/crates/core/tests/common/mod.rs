//! Generators and brute-force oracles shared by the integration tests. The
//! oracles recompute everything from first principles and never call the
//! scoring code they are checking.

#![allow(dead_code)]

use std::path::PathBuf;

use kpi_edgar::model::{EntitySpan, EntityType, Relation};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/kpi_edgar_sample.json")
}

pub fn q(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random non-overlapping typed spans inside `n` tokens, sorted by start.
pub fn random_span_set<R: Rng>(rng: &mut R, n: usize) -> Vec<EntitySpan> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < n {
        pos += rng.gen_range(0..=3);
        if pos >= n {
            break;
        }
        let len = rng.gen_range(1..=(n - pos).min(5));
        let t = *EntityType::ANNOTATED.choose(rng).unwrap();
        out.push(EntitySpan::new(pos, pos + len, t).unwrap());
        pos += len;
    }
    out
}

pub fn random_span<R: Rng>(rng: &mut R, n: usize, t: EntityType) -> EntitySpan {
    let start = rng.gen_range(0..n - 1);
    let end = rng.gen_range(start + 1..=(start + 4).min(n));
    EntitySpan::new(start, end, t).unwrap()
}

const PAIR_TYPES: [(EntityType, EntityType); 3] = [
    (EntityType::Kpi, EntityType::Cy),
    (EntityType::Kpi, EntityType::Py),
    (EntityType::Thereof, EntityType::Kpi),
];

/// A relation between two random spans of one of a few type pairs, with the
/// first type placed at a random side of the second.
pub fn random_relation<R: Rng>(rng: &mut R, n: usize) -> Relation {
    let (a, b) = *PAIR_TYPES.choose(rng).unwrap();
    Relation::new(random_span(rng, n, a), random_span(rng, n, b))
}

/// A prediction close to `gold`: each endpoint is kept, shifted, shrunk or
/// grown by at most one token.
pub fn perturb_relation<R: Rng>(rng: &mut R, gold: &Relation, n: usize) -> Relation {
    let mut nudge = |s: EntitySpan| {
        let mut start = s.start as i64 + rng.gen_range(-1..=1);
        let mut end = s.end as i64 + rng.gen_range(-1..=1);
        start = start.clamp(0, n as i64 - 1);
        end = end.clamp(start + 1, n as i64);
        EntitySpan::new(start as usize, end as usize, s.etype).unwrap()
    };
    Relation::new(nudge(gold.head()), nudge(gold.tail()))
}

fn shared(a: &EntitySpan, b: &EntitySpan) -> usize {
    (a.start..a.end)
        .filter(|i| (b.start..b.end).contains(i))
        .count()
}

/// Pairs endpoints by type, earlier span first on equal types.
fn by_type(r: &Relation) -> [EntitySpan; 2] {
    let mut v = [r.head(), r.tail()];
    v.sort_by_key(|s| (s.etype.index(), s.start, s.end));
    v
}

/// Partial-overlap credit of `pred` against `gold`, or `None` when the type
/// pairs differ. Returns (tp, fp).
pub fn oracle_credit(pred: &Relation, gold: &Relation) -> Option<(BigRational, BigRational)> {
    let p = by_type(pred);
    let g = by_type(gold);
    if p[0].etype != g[0].etype || p[1].etype != g[1].etype {
        return None;
    }
    let mut tp = q(0, 1);
    let mut fp = q(0, 1);
    for k in 0..2 {
        let o = shared(&p[k], &g[k]);
        tp += q(o, g[k].len()) / q(2, 1);
        fp += q(p[k].len() - o, p[k].len()) / q(2, 1);
    }
    Some((tp, fp))
}

/// Best (total tp, sentence fp) over every one-to-one assignment, by
/// exhaustive search: tp maximized first, then fp minimized. Unmatched
/// predictions cost one fp each.
pub fn brute_force_best(preds: &[Relation], golds: &[Relation]) -> (BigRational, BigRational) {
    fn go(
        g: usize,
        preds: &[Relation],
        golds: &[Relation],
        used: &mut Vec<bool>,
    ) -> (BigRational, BigRational) {
        if g == golds.len() {
            let spare = used.iter().filter(|u| !**u).count();
            return (q(0, 1), q(spare, 1));
        }
        let mut best = go(g + 1, preds, golds, used);
        for p in 0..preds.len() {
            if used[p] {
                continue;
            }
            if let Some((tp, fp)) = oracle_credit(&preds[p], &golds[g]) {
                if tp == q(0, 1) {
                    continue;
                }
                used[p] = true;
                let (rest_tp, rest_fp) = go(g + 1, preds, golds, used);
                used[p] = false;
                let cand = (tp + rest_tp, fp + rest_fp);
                if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    best = cand;
                }
            }
        }
        best
    }
    go(0, preds, golds, &mut vec![false; preds.len()])
}

/// Strict micro counts: (correct, predicted, gold).
pub fn strict_counts(preds: &[Relation], golds: &[Relation]) -> (usize, usize, usize) {
    let mut left: Vec<&Relation> = golds.iter().collect();
    let mut correct = 0;
    for p in preds {
        if let Some(i) = left.iter().position(|g| *g == p) {
            left.swap_remove(i);
            correct += 1;
        }
    }
    (correct, preds.len(), golds.len())
}

pub fn f1_from(p: &BigRational, r: &BigRational) -> BigRational {
    if p + r == q(0, 1) {
        q(0, 1)
    } else {
        q(2, 1) * p * r / (p + r)
    }
}

pub fn safe_ratio(n: &BigRational, d: &BigRational) -> BigRational {
    if *d == q(0, 1) {
        q(0, 1)
    } else {
        n / d
    }
}

/// Counts of the bundled fixture, produced by the generator script that wrote
/// it (an independent Python tally), not by this crate.
pub mod fixture_counts {
    use kpi_edgar::model::EntityType;
    use kpi_edgar::model::{EntityType::*, Split};

    pub const SENTENCES: usize = 20;
    pub const ENTITIES: usize = 69;
    pub const RELATIONS: usize = 46;
    pub const PER_TYPE: &[(EntityType, usize)] = &[
        (Kpi, 18),
        (Cy, 20),
        (Py, 8),
        (Py1, 3),
        (Increase, 3),
        (IncreasePy, 1),
        (Decrease, 2),
        (DecreasePy, 2),
        (Thereof, 4),
        (Attr, 3),
        (KpiCoref, 1),
        (FalsePositive, 4),
    ];
    pub const PER_SPLIT: &[(Split, usize)] =
        &[(Split::Train, 12), (Split::Valid, 3), (Split::Test, 5)];
}
