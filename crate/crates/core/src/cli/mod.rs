//! The `hdl` command-line pipeline.
//!
//! Every subcommand reads the shared [`RunConfig`] (flags over an optional
//! JSON file), writes its outputs into `--out`, and records a `manifest.json`
//! with input hashes, the resolved config, seed and version. Failures print a
//! one-line JSON error record on stderr and exit nonzero.

mod commands;
mod config;
mod manifest;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use config::{FeatureSource, RunConfig, DEFAULT_HASH_DIM};
pub use manifest::{sha256_file, Manifest, MANIFEST_FILE};

use crate::error::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "hdl",
    version,
    about = "Hierarchical distributional-label learning pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Route posts into lonely / non-lonely candidates (--posts) → candidates.csv.
    Filter,
    /// Stratified sample of candidates by forum and era (--posts, --target-n) → sample.jsonl.
    Sample,
    /// Aggregate annotations into distributional labels (--posts, --annotations) → dataset.jsonl.
    Aggregate,
    /// Hashed bag-of-words features (--posts, --hash-dim) → embeddings.jsonl.
    Featurize,
    /// 70/20/10 split of a labeled dataset (--dataset) → split.csv.
    Split,
    /// Train a model (--dataset, --model, features) → model.ckpt, train_log.csv.
    Train,
    /// Predict distributions (--checkpoint, features, --dataset or --posts) → predictions.jsonl.
    Predict,
    /// Score prediction runs against a dataset (--dataset, --predictions ...) → eval.csv.
    Eval,
    /// Category composition per group (--dataset or --predictions) → composition.csv.
    Compose,
    /// Interaction distribution conditioned on a category (--category, --mode) → coping.csv.
    Coping,
    /// Monthly proportions and segmented regression (--category, --label) → its_fit.csv, its_series.csv.
    Its,
    /// Hidden representations and predicted labels (--checkpoint, features) → representations.csv.
    ExportEmbeddings,
    /// Seeded toy corpus with annotations (--target-n posts) → posts.jsonl, annotations.jsonl.
    DemoCorpus,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Filter => "filter",
            Command::Sample => "sample",
            Command::Aggregate => "aggregate",
            Command::Featurize => "featurize",
            Command::Split => "split",
            Command::Train => "train",
            Command::Predict => "predict",
            Command::Eval => "eval",
            Command::Compose => "compose",
            Command::Coping => "coping",
            Command::Its => "its",
            Command::ExportEmbeddings => "export-embeddings",
            Command::DemoCorpus => "demo-corpus",
        }
    }
}

pub fn run(command: Command, flags: RunConfig) -> Result<()> {
    let cfg = RunConfig::resolve(flags)?;
    log::info!("{} with seed {}", command.as_str(), cfg.seed());
    match command {
        Command::Filter => commands::filter(&cfg),
        Command::Sample => commands::sample(&cfg),
        Command::Aggregate => commands::aggregate(&cfg),
        Command::Featurize => commands::featurize(&cfg),
        Command::Split => commands::split(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Predict => commands::predict(&cfg),
        Command::Eval => commands::eval(&cfg),
        Command::Compose => commands::compose(&cfg),
        Command::Coping => commands::coping(&cfg),
        Command::Its => commands::its(&cfg),
        Command::ExportEmbeddings => commands::export_embeddings(&cfg),
        Command::DemoCorpus => commands::demo_corpus(&cfg),
    }
}

/// Machine-readable error line printed on stderr.
pub fn error_record(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            eprintln!("{}", error_record("usage", e.to_string().trim()));
            return 2;
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HDL_LOG", "warn"))
        .format_timestamp(None)
        .init();
    match run(cli.command, cli.config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(e.kind(), &e.to_string()));
            if matches!(e, Error::InvalidArgument(_)) {
                2
            } else {
                1
            }
        }
    }
}
