mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, Status};
use io::{CliError, Output, BROKEN_PIPE};

fn run(cli: Cli) -> Result<Status, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(usize::from(n));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::new("runtime", e.to_string()))?;
    let mut out = Output::create(cli.out.as_deref())?;
    let ctx = Ctx {
        pool: &pool,
        out: &mut out,
        text: cli.text,
    };

    let status = match &cli.command {
        Command::Validate(g) => commands::validate(ctx, &g.gold),
        Command::Stats(g) => commands::stats(ctx, &g.gold),
        Command::Score { gold, pred } => commands::score(ctx, &gold.gold, pred),
        Command::Kappa { ann_a, ann_b } => commands::kappa(ctx, ann_a, ann_b),
        Command::Decode { scores } => commands::decode_scores(ctx, scores),
        Command::Spans {
            scores,
            max_span_len,
        } => commands::spans(ctx, scores, *max_span_len),
        Command::DetectMoney { input, gold } => {
            commands::detect_money(ctx, input.as_deref(), gold.as_deref())
        }
        Command::ExportConstraints => commands::export_constraints(ctx),
    }?;
    out.finish()?;
    Ok(status)
}

fn main() -> ExitCode {
    // usage errors exit with status 2 inside clap
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Findings) => ExitCode::from(1),
        Err(e) if e.kind == BROKEN_PIPE => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
