mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cqatag", version, about = "Tag analytics, baselines and evaluation for StackExchange dumps")]
pub struct Cli {
    /// Pipeline config (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Restrict to these domains (repeatable).
    #[arg(long = "domain", global = true)]
    pub domains: Vec<String>,

    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse dumps into corpora and seeded train/dev/test splits.
    Ingest(IngestArgs),
    /// Tag-usage statistics over ingested corpora.
    Analyze,
    /// Build MetaTag vocabularies from the training split.
    Vocab(VocabArgs),
    /// Train one-vs-rest linear baselines.
    TrainBaseline(TrainArgs),
    /// Write test-split predictions for a model.
    Predict(PredictArgs),
    /// Score prediction files against the test split.
    Eval(EvalArgs),
    /// Regenerate CSV tables from analysis.json and eval.json.
    Report,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Split seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VocabArgs {
    /// Coverage targets in percent; defaults to the configured targets.
    #[arg(long, value_delimiter = ',')]
    pub coverage: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LinearMode {
    Tfidf,
    Bow,
}

impl LinearMode {
    pub fn name(self) -> &'static str {
        match self {
            LinearMode::Tfidf => "tfidf",
            LinearMode::Bow => "bow",
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value = "tfidf")]
    pub mode: LinearMode,
    /// Train a single seed instead of every configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictMode {
    Majority,
    Tfidf,
    Bow,
    Decode,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_enum)]
    pub mode: PredictMode,
    /// Tags per post.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Run seed; linear modes default to every configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Meta-prediction file (decode mode).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Token-stream file (decode mode).
    #[arg(long)]
    pub streams: Option<PathBuf>,
    /// Model name recorded for decoded predictions.
    #[arg(long, default_value = "decode")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// k used for significance tests.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Vocabulary coverage used for OOV statistics.
    #[arg(long)]
    pub coverage: Option<f64>,
    /// Paired comparison `BASELINE,CANDIDATE` (repeatable).
    #[arg(long)]
    pub compare: Vec<String>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<cqatag::Error>() {
        Some(e) if e.is_user_error() => 1,
        Some(_) => 2,
        None => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
