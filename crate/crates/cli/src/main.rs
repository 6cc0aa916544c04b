//! `pea`: one binary driving the corpus pipeline. Every subcommand writes its
//! artifact plus a manifest JSON next to it.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors. Failures
//! print a single JSON line on stderr: `{"error": <kind>, "message": <text>}`.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::manifest::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "pea",
    version,
    about = "Wheel-aware emotion agreement and corpus tooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mask links and mentions, then drop duplicate tweets.
    Preprocess(PreprocessArgs),
    /// Keep tweets with at least one emotive lexicon word.
    Lexfilter(LexfilterArgs),
    /// Vocabulary size and hashtag/mention/link rates per source.
    Stats(StatsArgs),
    /// Score workers and the corpus with wheel-aware agreement.
    Pea(PeaArgs),
    /// Drop workers at or below the agreement threshold.
    FilterWorkers(FilterWorkersArgs),
    /// Vote annotations into per-item label sets.
    Aggregate(AggregateArgs),
    /// Fine-grained emotion counts per source.
    Distribution(DistributionArgs),
    /// Wheel-group co-occurrence matrix.
    Cooccur(CooccurArgs),
    /// Jensen-Shannon divergence between two corpora's token distributions.
    Jsd(JsdArgs),
    /// Build balanced binary tasks with train/valid/test splits.
    TasksBuild(TasksBuildArgs),
    /// Check split files for overlap, sizing and balance.
    TasksVerify(TasksVerifyArgs),
    /// Agreement distribution of uniformly random annotators.
    Calibrate(CalibrateArgs),
    /// Sample A/B annotation pairs into HIT files.
    AbPairs(AbPairsArgs),
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Tweets as JSON lines `{id, text, source?}`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Deduplicate on raw text instead of normalized text.
    #[arg(long)]
    raw_dedup: bool,
}

#[derive(Debug, Args)]
struct LexfilterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Word-level lexicon, `word<TAB>category<TAB>0|1`.
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// One or more tweet files. Untagged tweets take the file stem as source.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// JSON stats keyed by source.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct PeaArgs {
    /// Annotations as JSON lines `{item_id, worker_id, emotions}`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Average both directions of worker-to-worker agreement.
    #[arg(long)]
    symmetric: bool,
    /// Corpus mean over (item, worker) scores instead of over workers.
    #[arg(long)]
    worker_item: bool,
}

#[derive(Debug, Args)]
struct FilterWorkersArgs {
    #[arg(long)]
    input: PathBuf,
    /// Annotations from kept workers.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = pea_core::agreement::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    symmetric: bool,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    min_votes: usize,
    /// Tweet file to attach labels to; output becomes labeled tweets.
    #[arg(long)]
    tweets: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistributionArgs {
    /// Labeled tweets.
    #[arg(long)]
    input: PathBuf,
    /// CSV, one row per source plus `all`.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct CooccurArgs {
    /// Labeled tweets.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogBaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Debug, Args)]
struct JsdArgs {
    #[arg(long)]
    input: PathBuf,
    /// Second corpus.
    #[arg(long)]
    other: PathBuf,
    /// Top-k shared token densities as CSV.
    #[arg(long)]
    output: PathBuf,
    /// Subword vocabulary (one piece per line). Whitespace tokens without it.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Lowercase words before subword segmentation.
    #[arg(long)]
    lowercase: bool,
    #[arg(long, value_enum, default_value = "2")]
    log_base: LogBaseArg,
    #[arg(long, default_value_t = 1000)]
    top_k: usize,
}

#[derive(Debug, Args)]
struct TasksBuildArgs {
    /// Labeled tweets.
    #[arg(long)]
    input: PathBuf,
    /// Directory for split files; created if missing.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Use every non-positive item as a negative.
    #[arg(long)]
    keep_all_negatives: bool,
}

#[derive(Debug, Args)]
struct TasksVerifyArgs {
    /// Directory holding `<emotion>.<partition>.jsonl`.
    #[arg(long)]
    input: PathBuf,
    /// JSON report.
    #[arg(long)]
    output: PathBuf,
    /// Only these tasks (default: all eight).
    #[arg(long)]
    emotion: Vec<String>,
    /// Also require the published per-task partition counts.
    #[arg(long)]
    published: bool,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Histogram CSV.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 5000)]
    annotations: usize,
    #[arg(long, default_value_t = 3)]
    emotions: usize,
    #[arg(long, default_value_t = 5)]
    workers: usize,
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

#[derive(Debug, Args)]
struct AbPairsArgs {
    /// Annotations.
    #[arg(long)]
    input: PathBuf,
    /// Directory for HIT files; created if missing.
    #[arg(long)]
    output: PathBuf,
    /// Tweets providing item text.
    #[arg(long)]
    tweets: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    sample: usize,
    #[arg(long, default_value_t = 10)]
    per_hit: usize,
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Preprocess(a) => commands::preprocess(a),
        Command::Lexfilter(a) => commands::lexfilter(a),
        Command::Stats(a) => commands::stats(a),
        Command::Pea(a) => commands::pea(a),
        Command::FilterWorkers(a) => commands::filter_workers(a),
        Command::Aggregate(a) => commands::aggregate(a),
        Command::Distribution(a) => commands::distribution(a),
        Command::Cooccur(a) => commands::cooccur(a),
        Command::Jsd(a) => commands::jsd(a),
        Command::TasksBuild(a) => commands::tasks_build(a),
        Command::TasksVerify(a) => commands::tasks_verify(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::AbPairs(a) => commands::ab_pairs(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or_default();
            return Failure::usage(first.trim_start_matches("error: ")).report();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
