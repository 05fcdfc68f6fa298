mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use socdim_core::par::{self, Execution};

use crate::commands::Context;
use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "socdim", version, about = "Detect social dimensions of relationships in conversational text")]
struct Cli {
    /// TOML run configuration; defaults apply when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed in the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel maps (default: available parallelism)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Load corpora; write messages.jsonl and annotation passages
    Ingest,
    /// Gold gate, consensus labels, agreement and label distribution
    AnnotateStats,
    /// Rank discriminative n-grams per dimension
    SelectNgrams,
    /// Train one model per dimension and kind
    Train,
    /// Cross-validated AUC per dimension and kind
    Evaluate,
    /// Label corpus messages with trained models
    Score,
    /// Weekly prevalence z-scores
    Timeline,
    /// Dominant dimension per pair of users
    Relationships,
    /// Regress census indicators on regional prevalence
    GeoRegress,
    /// Mean AUC table from evaluation.csv
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::AnnotateStats => "annotate-stats",
            Command::SelectNgrams => "select-ngrams",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::Score => "score",
            Command::Timeline => "timeline",
            Command::Relationships => "relationships",
            Command::GeoRegress => "geo-regress",
            Command::Report => "report",
        }
    }
}

fn config_errors(errors: Vec<String>) -> ExitCode {
    eprintln!("invalid configuration:");
    for e in errors {
        eprintln!("  {e}");
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return config_errors(e),
        },
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.workers == Some(0) {
        return config_errors(vec!["--workers: must be at least 1".into()]);
    }
    if let Err(e) = cfg.validate(cli.command) {
        return config_errors(e);
    }
    let exec = match cli.workers {
        Some(1) => Execution::Sequential,
        Some(n) => {
            par::set_workers(n);
            Execution::Parallel
        }
        None => Execution::Parallel,
    };

    let result = Context::new(cfg, exec).and_then(|ctx| match cli.command {
        Command::Ingest => commands::ingest(&ctx),
        Command::AnnotateStats => commands::annotate_stats(&ctx),
        Command::SelectNgrams => commands::select(&ctx),
        Command::Train => commands::train(&ctx),
        Command::Evaluate => commands::run_evaluate(&ctx),
        Command::Score => commands::score(&ctx),
        Command::Timeline => commands::run_timeline(&ctx),
        Command::Relationships => commands::relationships(&ctx),
        Command::GeoRegress => commands::geo_regress(&ctx),
        Command::Report => commands::report(&ctx),
    });
    match result {
        Ok(artifacts) => {
            for p in artifacts.commit() {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
