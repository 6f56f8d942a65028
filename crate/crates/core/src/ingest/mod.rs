//! Dataset parsing and serialization, monetary-value detection and corpus
//! statistic checks.

mod dataset;
mod money;
pub mod records;

use serde::Serialize;

pub use dataset::{
    corpus_to_string, load_corpus, parse_corpus, save_corpus, sentence_record, EntityRecord,
    RelationRecord, SentenceRecord,
};
pub use money::{detect_monetary, filter_monetary_sentences, Currency, MonetaryMention, Scale};

use crate::model::{corpus_stats, Corpus, CorpusStats, EntityType, Split};

/// Reference counts for a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedStats {
    pub sentences: usize,
    pub entities: usize,
    pub relations: usize,
    pub per_type: &'static [(EntityType, usize)],
    pub per_split: &'static [(Split, usize)],
}

/// Published counts of the full KPI-EDGAR release.
pub const PUBLISHED_STATS: ExpectedStats = ExpectedStats {
    sentences: 1355,
    entities: 4522,
    relations: 3841,
    per_type: &[
        (EntityType::Kpi, 1341),
        (EntityType::Cy, 1211),
        (EntityType::Py, 619),
        (EntityType::Py1, 307),
        (EntityType::Increase, 35),
        (EntityType::IncreasePy, 15),
        (EntityType::Decrease, 23),
        (EntityType::DecreasePy, 11),
        (EntityType::Thereof, 507),
        (EntityType::Attr, 272),
        (EntityType::KpiCoref, 11),
        (EntityType::FalsePositive, 170),
    ],
    per_split: &[(Split::Train, 969), (Split::Valid, 146), (Split::Test, 240)],
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatDiff {
    pub field: String,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsCheck {
    pub matches: bool,
    pub diffs: Vec<StatDiff>,
}

/// Lists every count that differs from `expected`. Splits that `expected`
/// does not mention must be empty.
pub fn compare_stats(stats: &CorpusStats, expected: &ExpectedStats) -> StatsCheck {
    let mut diffs = Vec::new();
    let mut check = |field: String, expected: usize, found: usize| {
        if expected != found {
            diffs.push(StatDiff {
                field,
                expected,
                found,
            });
        }
    };
    check("sentences".into(), expected.sentences, stats.sentences);
    check("entities".into(), expected.entities, stats.entities);
    check("relations".into(), expected.relations, stats.relations);
    for t in EntityType::ANNOTATED {
        let want = expected
            .per_type
            .iter()
            .find(|(k, _)| *k == t)
            .map_or(0, |(_, v)| *v);
        let got = stats.per_type.get(&t).copied().unwrap_or(0);
        check(format!("per_type.{t}"), want, got);
    }
    for split in Split::ALL {
        let want = expected
            .per_split
            .iter()
            .find(|(k, _)| *k == split)
            .map_or(0, |(_, v)| *v);
        let got = stats.per_split.get(&split).copied().unwrap_or(0);
        check(format!("per_split.{split}"), want, got);
    }
    StatsCheck {
        matches: diffs.is_empty(),
        diffs,
    }
}

/// Compares the corpus against [`PUBLISHED_STATS`].
pub fn verify_against_published(corpus: &Corpus) -> StatsCheck {
    compare_stats(&corpus_stats(corpus), &PUBLISHED_STATS)
}
