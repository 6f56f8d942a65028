use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use kpi_edgar::ingest::records::{
    parse_candidates, parse_prediction, parse_score_record, parse_tokens, ScoredSpanRecord,
};
use kpi_edgar::ingest::{
    compare_stats, detect_monetary, load_corpus, MonetaryMention, PUBLISHED_STATS,
};
use kpi_edgar::iobes::{decode, masked_greedy_decode};
use kpi_edgar::metrics::{
    cohens_kappa, kappa_only_entities, kappa_per_type, score_sentence, Agreement, ScoreAccumulator,
    WordLabelSequence,
};
use kpi_edgar::model::{
    corpus_stats, validate_sentence, Corpus, EntitySpan, EntityType, Relation, Violation,
};
use kpi_edgar::relations::{constraints_json, validate_cardinality, CardinalityViolation};
use kpi_edgar::spanner::filter_overlaps;
use kpi_edgar::MetricsError;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;
use serde_json::json;

use crate::io::{open, stream_jsonl, CliError, Output};

pub struct Ctx<'a> {
    pub pool: &'a ThreadPool,
    pub out: &'a mut Output,
    pub text: bool,
}

/// Whether the command found problems in otherwise readable input.
pub enum Status {
    Clean,
    Findings,
}

#[derive(Serialize)]
struct SentenceProblems {
    id: String,
    violations: Vec<Violation>,
    cardinality: Vec<CardinalityViolation>,
}

#[derive(Serialize)]
struct ValidationReport {
    sentences: usize,
    valid_sentences: usize,
    valid: bool,
    problems: Vec<SentenceProblems>,
}

pub fn validate(ctx: Ctx, gold: &Path) -> Result<Status, CliError> {
    let corpus = load_corpus(gold)?;
    let problems: Vec<SentenceProblems> = ctx.pool.install(|| {
        corpus
            .sentences()
            .par_iter()
            .map(|s| SentenceProblems {
                id: s.sentence_id().to_owned(),
                violations: validate_sentence(s),
                cardinality: validate_cardinality(s.relations()),
            })
            .filter(|p| !p.violations.is_empty() || !p.cardinality.is_empty())
            .collect()
    });
    let report = ValidationReport {
        sentences: corpus.len(),
        valid_sentences: corpus.len() - problems.len(),
        valid: problems.is_empty(),
        problems,
    };

    if ctx.text {
        let mut s = format!(
            "{} sentences, {} valid\n",
            report.sentences, report.valid_sentences
        );
        for p in &report.problems {
            for v in &p.violations {
                let _ = writeln!(s, "{}: {v}", p.id);
            }
            for c in &p.cardinality {
                let _ = writeln!(s, "{}: {c}", p.id);
            }
        }
        ctx.out.text(&s)?;
    } else {
        ctx.out.json(&report)?;
    }
    Ok(if report.valid {
        Status::Clean
    } else {
        Status::Findings
    })
}

pub fn stats(ctx: Ctx, gold: &Path) -> Result<Status, CliError> {
    let corpus = load_corpus(gold)?;
    let stats = corpus_stats(&corpus);
    let check = compare_stats(&stats, &PUBLISHED_STATS);
    if ctx.text {
        let mut s = format!(
            "sentences={} entities={} relations={} matches={}\n",
            stats.sentences, stats.entities, stats.relations, check.matches
        );
        for (t, n) in &stats.per_type {
            let _ = writeln!(s, "  {:<15} {n}", t.name());
        }
        for (split, n) in &stats.per_split {
            let _ = writeln!(s, "  split {:<9} {n}", split.to_string());
        }
        for d in &check.diffs {
            let _ = writeln!(
                s,
                "  differs: {} expected {} found {}",
                d.field, d.expected, d.found
            );
        }
        ctx.out.text(&s)?;
    } else {
        ctx.out.json(&json!({"stats": stats, "published": check}))?;
    }
    Ok(Status::Clean)
}

pub fn score(ctx: Ctx, gold: &Path, pred: &Path) -> Result<Status, CliError> {
    let corpus = load_corpus(gold)?;
    let mut preds: BTreeMap<String, Vec<Relation>> = BTreeMap::new();
    stream_jsonl(
        open(pred)?,
        ctx.pool,
        |l| {
            let p = parse_prediction(&l.text, l.line, l.record)?;
            if corpus.get(&p.id).is_none() {
                return Err(CliError::new(
                    "metrics",
                    format!("line {}: {}", l.line, MetricsError::UnknownSentence(p.id)),
                ));
            }
            Ok(p)
        },
        |p| {
            preds.entry(p.id).or_default().extend(p.relations);
            Ok(())
        },
    )?;

    let scores: Vec<_> = ctx.pool.install(|| {
        corpus
            .sentences()
            .par_iter()
            .map(|s| {
                let p = preds.get(s.sentence_id()).map_or(&[][..], Vec::as_slice);
                score_sentence(p, s.relations())
            })
            .collect()
    });
    let mut acc = ScoreAccumulator::new();
    for s in &scores {
        acc.add(s);
    }
    let report = acc.finish();
    if ctx.text {
        ctx.out.text(&report.to_text_table())?;
    } else {
        ctx.out.json(&report)?;
    }
    Ok(Status::Clean)
}

fn aligned_labels(
    a: &Corpus,
    b: &Corpus,
) -> Result<(WordLabelSequence, WordLabelSequence), CliError> {
    let mut la = Vec::new();
    let mut lb = Vec::new();
    for sa in a.sentences() {
        let sb = b.get(sa.sentence_id()).ok_or_else(|| {
            CliError::new(
                "input",
                format!(
                    "sentence {:?} missing from the second annotation",
                    sa.sentence_id()
                ),
            )
        })?;
        if sa.len() != sb.len() {
            return Err(CliError::new(
                "input",
                format!(
                    "sentence {:?} has {} tokens in one annotation and {} in the other",
                    sa.sentence_id(),
                    sa.len(),
                    sb.len()
                ),
            ));
        }
        la.extend(sa.word_labels());
        lb.extend(sb.word_labels());
    }
    if a.len() != b.len() {
        let extra = b
            .sentences()
            .iter()
            .find(|s| a.get(s.sentence_id()).is_none());
        let id = extra.map_or("?", |s| s.sentence_id());
        return Err(CliError::new(
            "input",
            format!("sentence {id:?} missing from the first annotation"),
        ));
    }
    Ok((la.into(), lb.into()))
}

fn fmt_agreement(a: Agreement) -> String {
    a.value()
        .map_or_else(|| "undefined".into(), |k| format!("{k:.4}"))
}

pub fn kappa(ctx: Ctx, ann_a: &Path, ann_b: &Path) -> Result<Status, CliError> {
    let (a, b) = aligned_labels(&load_corpus(ann_a)?, &load_corpus(ann_b)?)?;
    let overall = cohens_kappa(&a, &b)?;
    let only = kappa_only_entities(&a, &b)?;
    let mut per_type = serde_json::Map::new();
    let mut rows = Vec::new();
    for t in EntityType::ANNOTATED {
        let k = kappa_per_type(&a, &b, t)?;
        per_type.insert(t.name().to_owned(), serde_json::to_value(k)?);
        rows.push((t, k));
    }
    if ctx.text {
        let mut s = format!(
            "overall        {overall:.4}\nonly entities  {}\n",
            fmt_agreement(only)
        );
        for (t, k) in rows {
            let _ = writeln!(s, "{:<15}{}", t.name(), fmt_agreement(k));
        }
        ctx.out.text(&s)?;
    } else {
        ctx.out.json(&json!({
            "tokens": a.len(),
            "overall": overall,
            "only_entities": only,
            "per_type": per_type,
        }))?;
    }
    Ok(Status::Clean)
}

#[derive(Serialize)]
struct EntityOut {
    start: usize,
    end: usize,
    #[serde(rename = "type")]
    etype: EntityType,
}

impl From<EntitySpan> for EntityOut {
    fn from(e: EntitySpan) -> Self {
        Self {
            start: e.start,
            end: e.end,
            etype: e.etype,
        }
    }
}

pub fn decode_scores(ctx: Ctx, scores: &Path) -> Result<Status, CliError> {
    let text = ctx.text;
    let out = ctx.out;
    stream_jsonl(
        open(scores)?,
        ctx.pool,
        |l| {
            let rec = parse_score_record(&l.text, l.line, l.record)?;
            let tags = masked_greedy_decode(&rec.scores);
            let entities = decode(&tags)?;
            Ok((rec.id, tags, entities))
        },
        |(id, tags, entities)| {
            if text {
                let tags: Vec<String> = tags.iter().map(ToString::to_string).collect();
                out.text(&format!("{id}\t{}", tags.join(" ")))
            } else {
                out.json_line(&json!({
                    "id": id,
                    "tags": tags.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "entities": entities.into_iter().map(EntityOut::from).collect::<Vec<_>>(),
                }))
            }
        },
    )?;
    Ok(Status::Clean)
}

pub fn spans(ctx: Ctx, scores: &Path, max_span_len: usize) -> Result<Status, CliError> {
    let text = ctx.text;
    let out = ctx.out;
    stream_jsonl(
        open(scores)?,
        ctx.pool,
        |l| {
            let rec = parse_candidates(&l.text, l.line, l.record)?;
            let short: Vec<_> = rec
                .spans
                .into_iter()
                .filter(|s| s.span.len() <= max_span_len)
                .collect();
            Ok((rec.id, filter_overlaps(&short)))
        },
        |(id, kept)| {
            if text {
                let shown: Vec<String> = kept
                    .iter()
                    .map(|s| format!("{}@{} {:.4}", s.etype, s.span, s.score))
                    .collect();
                out.text(&format!("{id}\t{}", shown.join(" ")))
            } else {
                let spans: Vec<ScoredSpanRecord> = kept.into_iter().map(Into::into).collect();
                out.json_line(&json!({"id": id, "spans": spans}))
            }
        },
    )?;
    Ok(Status::Clean)
}

#[derive(Serialize)]
struct MentionOut {
    start: usize,
    end: usize,
    value: String,
    scale: kpi_edgar::ingest::Scale,
    multiplier: u64,
    currency: kpi_edgar::ingest::Currency,
    amount: String,
}

impl From<&MonetaryMention> for MentionOut {
    fn from(m: &MonetaryMention) -> Self {
        Self {
            start: m.value_span.start,
            end: m.value_span.end,
            value: m.numeric_value.to_string(),
            scale: m.scale,
            multiplier: m.scale.multiplier(),
            currency: m.currency,
            amount: m.amount().to_string(),
        }
    }
}

fn emit_mentions(
    out: &mut Output,
    text: bool,
    id: &str,
    tokens: &[String],
    m: &[MonetaryMention],
) -> Result<(), CliError> {
    if text {
        let shown: Vec<String> = m
            .iter()
            .map(|x| {
                format!(
                    "{} ({} x{} {:?})",
                    tokens[x.value_span.start],
                    x.numeric_value,
                    x.scale.multiplier(),
                    x.currency
                )
            })
            .collect();
        out.text(&format!("{id}\t{}", shown.join("; ")))
    } else {
        out.json_line(&json!({
            "id": id,
            "mentions": m.iter().map(MentionOut::from).collect::<Vec<_>>(),
        }))
    }
}

pub fn detect_money(
    ctx: Ctx,
    input: Option<&Path>,
    gold: Option<&Path>,
) -> Result<Status, CliError> {
    let text = ctx.text;
    let out = ctx.out;
    if let Some(gold) = gold {
        let corpus = load_corpus(gold)?;
        let found: Vec<(Vec<String>, Vec<MonetaryMention>)> = ctx.pool.install(|| {
            corpus
                .sentences()
                .par_iter()
                .map(|s| {
                    let toks: Vec<String> =
                        s.token_texts().into_iter().map(str::to_owned).collect();
                    let m = detect_monetary(&toks);
                    (toks, m)
                })
                .collect()
        });
        for (s, (toks, m)) in corpus.sentences().iter().zip(&found) {
            emit_mentions(out, text, s.sentence_id(), toks, m)?;
        }
        return Ok(Status::Clean);
    }
    let input = input.expect("clap requires --input or --gold");
    stream_jsonl(
        open(input)?,
        ctx.pool,
        |l| {
            let rec = parse_tokens(&l.text, l.line, l.record)?;
            let m = detect_monetary(&rec.tokens);
            Ok((rec, m))
        },
        |(rec, m)| emit_mentions(out, text, &rec.id, &rec.tokens, &m),
    )?;
    Ok(Status::Clean)
}

pub fn export_constraints(ctx: Ctx) -> Result<Status, CliError> {
    let table = constraints_json();
    if ctx.text {
        let types = EntityType::ANNOTATED;
        let mut s = format!("{:<15}", "");
        for t in types {
            let _ = write!(s, "{:>8}", abbreviate(t.name()));
        }
        s.push('\n');
        for a in types {
            let _ = write!(s, "{:<15}", a.name());
            for b in types {
                let cell = table[a.name()][b.name()].as_str().unwrap_or("?");
                let _ = write!(s, "{cell:>8}");
            }
            s.push('\n');
        }
        ctx.out.text(&s)?;
    } else {
        ctx.out.json(&table)?;
    }
    Ok(Status::Clean)
}

fn abbreviate(name: &str) -> &str {
    match name {
        "increase-py" => "inc-py",
        "decrease-py" => "dec-py",
        "kpi-coref" => "coref",
        "false-positive" => "fp",
        "increase" => "inc",
        "decrease" => "dec",
        other => other,
    }
}
