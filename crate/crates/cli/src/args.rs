use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kpi_edgar::spanner::DEFAULT_MAX_SPAN_LEN;

/// Validate, summarize and score KPI relation annotations on annual-report sentences.
#[derive(Debug, Parser)]
#[command(name = "kpi-edgar", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Human-readable text instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check schema, span invariants and relation constraints of a dataset file.
    Validate(GoldArg),
    /// Corpus counts, compared against the published release.
    Stats(GoldArg),
    /// Strict and adjusted relation scores of predictions against gold.
    Score {
        #[command(flatten)]
        gold: GoldArg,
        /// Predictions, one JSON object per line: {id, entities, relations}.
        #[arg(long, value_name = "PATH")]
        pred: PathBuf,
    },
    /// Word-level Cohen's kappa between two annotations of the same sentences.
    Kappa {
        #[arg(long = "ann-a", value_name = "PATH")]
        ann_a: PathBuf,
        #[arg(long = "ann-b", value_name = "PATH")]
        ann_b: PathBuf,
    },
    /// Greedy masked IOBES decoding of per-token score matrices.
    Decode {
        /// Score matrices, one JSON object per line: {id, scores}.
        #[arg(long, value_name = "PATH")]
        scores: PathBuf,
    },
    /// Overlap filtering of scored candidate spans.
    Spans {
        /// Candidates, one JSON object per line: {id, spans: [{start, end, type, score}]}.
        #[arg(long, value_name = "PATH")]
        scores: PathBuf,
        /// Candidates longer than this are discarded before filtering.
        #[arg(long, default_value_t = DEFAULT_MAX_SPAN_LEN, value_parser = clap::value_parser!(usize))]
        max_span_len: usize,
    },
    /// Monetary values with scale and currency.
    DetectMoney {
        /// Token lists, one JSON object per line: {id, tokens}.
        #[arg(
            long,
            value_name = "PATH",
            required_unless_present = "gold",
            conflicts_with = "gold"
        )]
        input: Option<PathBuf>,
        /// Take the sentences of a dataset file instead.
        #[arg(long, value_name = "PATH")]
        gold: Option<PathBuf>,
    },
    /// The allowed-relation matrix as JSON.
    ExportConstraints,
}

#[derive(Debug, Args)]
pub struct GoldArg {
    /// Dataset file in the canonical JSON format.
    #[arg(long, value_name = "PATH")]
    pub gold: PathBuf,
}
