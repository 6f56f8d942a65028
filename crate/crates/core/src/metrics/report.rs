use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{match_relations, prf, PrfScores, RelationCounts};
use crate::error::MetricsError;
use crate::model::{Corpus, EntityType, Relation};

/// Key used for the per-type breakdown, e.g. `kpi--cy`.
pub fn type_pair_key((a, b): (EntityType, EntityType)) -> String {
    format!("{a}--{b}")
}

/// Counts contributed by one sentence, before any division.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceScore {
    pub strict: BTreeMap<String, RelationCounts>,
    pub adjusted: BTreeMap<String, RelationCounts>,
    pub matched_pairs: usize,
    pub unmatched_gold: usize,
    pub unmatched_pred: usize,
    pub gold_relations: usize,
    pub predicted_relations: usize,
}

fn bump(map: &mut BTreeMap<String, RelationCounts>, key: String, counts: &RelationCounts) {
    *map.entry(key).or_default() += counts;
}

/// Strict and adjusted counts for one sentence.
///
/// Strict: a prediction is correct only if it equals a gold relation exactly
/// (both spans and both types), each gold used at most once. Adjusted: the
/// matching of [`match_relations`].
pub fn score_sentence(preds: &[Relation], golds: &[Relation]) -> SentenceScore {
    let mut out = SentenceScore {
        gold_relations: golds.len(),
        predicted_relations: preds.len(),
        ..Default::default()
    };

    let mut gold_used = vec![false; golds.len()];
    for p in preds {
        let key = type_pair_key(p.type_pair());
        match (0..golds.len()).find(|&g| !gold_used[g] && golds[g] == *p) {
            Some(g) => {
                gold_used[g] = true;
                bump(&mut out.strict, key, &RelationCounts::exact());
            }
            None => bump(&mut out.strict, key, &RelationCounts::spurious()),
        }
    }
    for (g, used) in gold_used.iter().enumerate() {
        if !used {
            bump(
                &mut out.strict,
                type_pair_key(golds[g].type_pair()),
                &RelationCounts::missed(),
            );
        }
    }

    let assignment = match_relations(preds, golds);
    for pair in &assignment.pairs {
        bump(
            &mut out.adjusted,
            type_pair_key(golds[pair.gold].type_pair()),
            &pair.counts,
        );
    }
    for &g in &assignment.unmatched_gold {
        bump(
            &mut out.adjusted,
            type_pair_key(golds[g].type_pair()),
            &RelationCounts::missed(),
        );
    }
    for &p in &assignment.unmatched_pred {
        bump(
            &mut out.adjusted,
            type_pair_key(preds[p].type_pair()),
            &RelationCounts::spurious(),
        );
    }
    out.matched_pairs = assignment.pairs.len();
    out.unmatched_gold = assignment.unmatched_gold.len();
    out.unmatched_pred = assignment.unmatched_pred.len();
    out
}

/// Order-insensitive fold of [`SentenceScore`]s.
#[derive(Debug, Clone, Default)]
pub struct ScoreAccumulator {
    total: SentenceScore,
}

impl ScoreAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, s: &SentenceScore) {
        for (k, c) in &s.strict {
            bump(&mut self.total.strict, k.clone(), c);
        }
        for (k, c) in &s.adjusted {
            bump(&mut self.total.adjusted, k.clone(), c);
        }
        self.total.matched_pairs += s.matched_pairs;
        self.total.unmatched_gold += s.unmatched_gold;
        self.total.unmatched_pred += s.unmatched_pred;
        self.total.gold_relations += s.gold_relations;
        self.total.predicted_relations += s.predicted_relations;
    }

    pub fn finish(self) -> ScoreReport {
        let t = self.total;
        let sum = |m: &BTreeMap<String, RelationCounts>| {
            m.values().fold(RelationCounts::zero(), |mut acc, c| {
                acc += c;
                acc
            })
        };
        let strict_counts = sum(&t.strict);
        let adjusted_counts = sum(&t.adjusted);

        let mut per_relation_type = BTreeMap::new();
        for key in t.strict.keys().chain(t.adjusted.keys()) {
            if per_relation_type.contains_key(key) {
                continue;
            }
            let s = t.strict.get(key).cloned().unwrap_or_default();
            let a = t.adjusted.get(key).cloned().unwrap_or_default();
            per_relation_type.insert(
                key.clone(),
                TypeScores {
                    strict: prf(&s),
                    adjusted: prf(&a),
                    strict_counts: s,
                    adjusted_counts: a,
                },
            );
        }

        ScoreReport {
            strict: prf(&strict_counts),
            adjusted: prf(&adjusted_counts),
            strict_counts,
            adjusted_counts,
            per_relation_type,
            matched_pairs: t.matched_pairs,
            unmatched_gold: t.unmatched_gold,
            unmatched_pred: t.unmatched_pred,
            gold_relations: t.gold_relations,
            predicted_relations: t.predicted_relations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeScores {
    pub strict: PrfScores,
    pub adjusted: PrfScores,
    pub strict_counts: RelationCounts,
    pub adjusted_counts: RelationCounts,
}

/// Micro-averaged strict and adjusted scores over a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScoreReport {
    pub strict: PrfScores,
    pub adjusted: PrfScores,
    pub strict_counts: RelationCounts,
    pub adjusted_counts: RelationCounts,
    pub per_relation_type: BTreeMap<String, TypeScores>,
    pub matched_pairs: usize,
    pub unmatched_gold: usize,
    pub unmatched_pred: usize,
    pub gold_relations: usize,
    pub predicted_relations: usize,
}

type Metric = fn(&PrfScores) -> f64;

fn pct(s: &PrfScores, which: Metric) -> String {
    format!("{:.2}", 100.0 * which(s))
}

impl ScoreReport {
    /// Two-column table: conventional and adjusted scores in percent.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        let header = ("", "Relation F1 in %", "Adjusted Relation F1 in %");
        let _ = writeln!(out, "{:<28} {:>18} {:>27}", header.0, header.1, header.2);
        let rows: [(&str, Metric); 3] = [
            ("precision", PrfScores::precision_f64),
            ("recall", PrfScores::recall_f64),
            ("f1", PrfScores::f1_f64),
        ];
        for (name, f) in rows {
            let _ = writeln!(
                out,
                "{:<28} {:>18} {:>27}",
                name,
                pct(&self.strict, f),
                pct(&self.adjusted, f)
            );
        }
        if !self.per_relation_type.is_empty() {
            let _ = writeln!(out);
            for (key, t) in &self.per_relation_type {
                let _ = writeln!(
                    out,
                    "{:<28} {:>18} {:>27}",
                    format!("f1 {key}"),
                    pct(&t.strict, PrfScores::f1_f64),
                    pct(&t.adjusted, PrfScores::f1_f64)
                );
            }
        }
        let _ = writeln!(
            out,
            "\nmatched={} unmatched_gold={} unmatched_pred={}",
            self.matched_pairs, self.unmatched_gold, self.unmatched_pred
        );
        out
    }
}

/// Scores per-sentence predictions against a gold corpus. Gold sentences
/// without predictions count as predicting nothing; repeated ids are merged.
pub fn score_corpus<I>(preds: I, golds: &Corpus) -> Result<ScoreReport, MetricsError>
where
    I: IntoIterator<Item = (String, Vec<Relation>)>,
{
    let mut by_id: BTreeMap<String, Vec<Relation>> = BTreeMap::new();
    for (id, rels) in preds {
        if golds.get(&id).is_none() {
            return Err(MetricsError::UnknownSentence(id));
        }
        by_id.entry(id).or_default().extend(rels);
    }
    let mut acc = ScoreAccumulator::new();
    for s in golds.sentences() {
        let p = by_id.get(s.sentence_id()).map_or(&[][..], Vec::as_slice);
        acc.add(&score_sentence(p, s.relations()));
    }
    Ok(acc.finish())
}
