//! One-to-one alignment of predicted and gold relations within a sentence.
//!
//! A prediction is eligible for a gold relation when both have the same
//! entity-type pair and the prediction earns a positive `tp`. Among all
//! one-to-one assignments over eligible pairs the one with the largest total
//! `tp` wins. Among those, the one with the smallest total `fp` over the
//! sentence wins (so an exact duplicate of a gold relation is never passed
//! over for a looser pair with equal `tp`). Remaining ties go to the
//! lexicographically smallest list of `(gold index, pred index)` pairs.
//!
//! Both objectives are folded into one integer weight per pair. With `Lg`
//! and `Lp` the lcm of the gold and predicted entity sizes,
//! `2·Lg·tp = o_i·Lg/ng_i + o_j·Lg/ng_j` and, since an unmatched prediction
//! costs `fp = 1`, the saving from matching it is
//! `2·Lp·(1 - fp) = o_i·Lp/np_i + o_j·Lp/np_j`. The weight is
//! `2·Lg·tp · S + 2·Lp·(1 - fp)` with `S` larger than any possible total of
//! the second term. The assignment runs on `i128` when that provably cannot
//! overflow and on `BigInt` otherwise.

use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{relation_counts, RelationCounts};
use crate::model::Relation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedPair {
    pub gold: usize,
    pub pred: usize,
    pub counts: RelationCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    /// Sorted by gold index.
    pub pairs: Vec<MatchedPair>,
    pub unmatched_gold: Vec<usize>,
    pub unmatched_pred: Vec<usize>,
}

impl Assignment {
    pub fn total_tp(&self) -> super::Rational {
        self.pairs
            .iter()
            .fold(super::Rational::zero(), |acc, p| acc + &p.counts.tp)
    }
}

fn size_lcm(rels: &[Relation]) -> BigInt {
    rels.iter().fold(BigInt::one(), |l, r| {
        let (a, b) = r.type_aligned();
        l.lcm(&BigInt::from(a.len())).lcm(&BigInt::from(b.len()))
    })
}

/// Combined weight of every (gold, pred) pair; 0 marks an ineligible pair.
fn pair_weights(preds: &[Relation], golds: &[Relation]) -> Vec<Vec<BigInt>> {
    let lg = size_lcm(golds);
    let lp = size_lcm(preds);
    let scale = BigInt::from(2) * &lp * BigInt::from(preds.len().min(golds.len())) + 1;
    golds
        .iter()
        .map(|g| {
            preds
                .iter()
                .map(|p| {
                    if p.type_pair() != g.type_pair() {
                        return BigInt::zero();
                    }
                    let (pi, pj) = p.type_aligned();
                    let (gi, gj) = g.type_aligned();
                    let oi = BigInt::from(pi.interval().intersection_len(&gi.interval()));
                    let oj = BigInt::from(pj.interval().intersection_len(&gj.interval()));
                    let tp =
                        &oi * (&lg / BigInt::from(gi.len())) + &oj * (&lg / BigInt::from(gj.len()));
                    if tp.is_zero() {
                        return BigInt::zero();
                    }
                    let saving =
                        &oi * (&lp / BigInt::from(pi.len())) + &oj * (&lp / BigInt::from(pj.len()));
                    tp * &scale + saving
                })
                .collect()
        })
        .collect()
}

/// The same weights as `i128`, if every weight, assignment total and dual
/// potential is guaranteed to stay within range.
fn narrow(w: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    let rows: Vec<Vec<i128>> = w
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect::<Option<_>>())
        .collect::<Option<_>>()?;
    let max = rows.iter().flatten().copied().max().unwrap_or(0);
    let cols = w.first().map_or(0, Vec::len);
    max.checked_mul(4 * (rows.len() + cols + 1) as i128)?;
    Some(rows)
}

pub fn match_relations(preds: &[Relation], golds: &[Relation]) -> Assignment {
    let big = pair_weights(preds, golds);
    let chosen = match narrow(&big) {
        Some(w) => lexicographic_max(&w),
        None => lexicographic_max(&big),
    };

    let mut used_pred = vec![false; preds.len()];
    let mut out = Assignment::default();
    for (g, choice) in chosen.into_iter().enumerate() {
        match choice {
            Some(p) => {
                used_pred[p] = true;
                out.pairs.push(MatchedPair {
                    gold: g,
                    pred: p,
                    counts: relation_counts(&preds[p], &golds[g]),
                });
            }
            None => out.unmatched_gold.push(g),
        }
    }
    out.unmatched_pred = (0..preds.len()).filter(|p| !used_pred[*p]).collect();
    out
}

trait Weight:
    Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T> + Neg<Output = T>> Weight for T {}

/// Lexicographically smallest maximum-weight matching.
///
/// Entry `g` of the result is the column matched to row `g`, if any. Only
/// positive entries count as edges.
fn lexicographic_max<T: Weight>(w: &[Vec<T>]) -> Vec<Option<usize>> {
    let rows = w.len();
    let cols = w.first().map_or(0, Vec::len);
    let mut result = vec![None; rows];
    if rows == 0 || cols == 0 {
        return result;
    }

    let mut col_free = vec![true; cols];
    let mut target = max_weight(w, 0, &col_free);
    for g in 0..rows {
        let mut picked = None;
        for p in 0..cols {
            if !col_free[p] || w[g][p] <= T::zero() {
                continue;
            }
            col_free[p] = false;
            let rest = max_weight(w, g + 1, &col_free);
            if w[g][p].clone() + rest == target {
                picked = Some(p);
                target = target - w[g][p].clone();
                break;
            }
            col_free[p] = true;
        }
        result[g] = picked;
    }
    result
}

/// Maximum total weight of a matching between rows `first_row..` and the free columns.
fn max_weight<T: Weight>(w: &[Vec<T>], first_row: usize, col_free: &[bool]) -> T {
    let rows: Vec<usize> = (first_row..w.len()).collect();
    let cols: Vec<usize> = (0..col_free.len()).filter(|c| col_free[*c]).collect();
    if rows.is_empty() || cols.is_empty() {
        return T::zero();
    }
    let sub = |r: usize, c: usize| {
        let v = w[rows[r]][cols[c]].clone();
        if v > T::zero() {
            v
        } else {
            T::zero()
        }
    };
    // the assignment routine wants no more rows than columns
    let (n, m) = (rows.len(), cols.len());
    let matrix: Vec<Vec<T>> = if n <= m {
        (0..n)
            .map(|r| (0..m).map(|c| sub(r, c)).collect())
            .collect()
    } else {
        (0..m)
            .map(|c| (0..n).map(|r| sub(r, c)).collect())
            .collect()
    };
    hungarian_max(&matrix)
}

/// Value of a maximum-weight full assignment of rows to distinct columns
/// (`rows <= cols`), via shortest augmenting paths with potentials.
fn hungarian_max<T: Weight>(w: &[Vec<T>]) -> T {
    let n = w.len();
    let m = w[0].len();
    debug_assert!(n <= m);
    let cost = |i: usize, j: usize| -w[i - 1][j - 1].clone();

    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<T>> = vec![None; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|mv| cur < *mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("a free column remains while rows <= cols");
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(mv) = minv[j].take() {
                    minv[j] = Some(mv - delta.clone());
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    (1..=m)
        .filter(|&j| p[j] != 0)
        .fold(T::zero(), |acc, j| acc + w[p[j] - 1][j - 1].clone())
}
