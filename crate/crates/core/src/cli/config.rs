use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{ConditionMode, Grouping, DEFAULT_INTERVENTION_MONTH};
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::schema::Category;

pub const DEFAULT_HASH_DIM: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Hash,
    Embeddings,
}

/// Every setting of a run. The JSON config file uses these field names in
/// kebab-case; a flag given on the command line overrides the file.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    /// JSON config file with defaults for any of these flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Posts JSONL ({id, subreddit, created_utc, title, body}).
    #[arg(long, global = true)]
    pub posts: Option<PathBuf>,
    /// Annotations JSONL, one line per (post, annotator).
    #[arg(long, global = true)]
    pub annotations: Option<PathBuf>,
    /// Embeddings JSONL ({id, v}).
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// Labeled dataset JSONL written by `aggregate`.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub model: Option<ModelKind>,
    /// Blend coefficient for HDLN outputs (not valid for embed-mlp).
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    #[arg(long, global = true)]
    pub warmup_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub patience: Option<usize>,
    #[arg(long, global = true)]
    pub intervention_month: Option<i64>,
    #[arg(long, global = true)]
    pub category: Option<Category>,
    #[arg(long, global = true)]
    pub label: Option<String>,
    /// `all`, `subreddit`, or `subreddit=a,b`.
    #[arg(long, global = true)]
    pub group: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub features: Option<FeatureSource>,
    #[arg(long, global = true)]
    pub hash_dim: Option<usize>,
    /// Sample size for `sample`.
    #[arg(long, global = true)]
    pub target_n: Option<usize>,
    /// Model checkpoint written by `train`.
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    /// Prediction JSONL; repeat for several runs in `eval`.
    #[arg(long, global = true)]
    pub predictions: Vec<PathBuf>,
    /// Split CSV (post_id,split) written by `split`.
    #[arg(long, global = true)]
    pub split: Option<PathBuf>,
    /// Restrict `predict` / `export-embeddings` to one split: train, validation or test.
    #[arg(long, global = true)]
    pub subset: Option<crate::corpus::Split>,
    /// Conditioning mode for `coping`: soft or argmax.
    #[arg(long, global = true)]
    pub mode: Option<ConditionMode>,
}

fn overlay(base: &mut Value, top: Value) {
    if let (Value::Object(base), Value::Object(top)) = (base, top) {
        for (k, v) in top {
            let empty = v.is_null() || v.as_array().is_some_and(Vec::is_empty);
            if !empty {
                base.insert(k, v);
            }
        }
    }
}

impl RunConfig {
    /// Merges the config file named by `--config` (if any) under the flags.
    pub fn resolve(flags: RunConfig) -> Result<RunConfig> {
        let Some(path) = flags.config.clone() else {
            return Ok(flags);
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let file: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let mut merged =
            serde_json::to_value(&file).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        overlay(
            &mut merged,
            serde_json::to_value(&flags).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        );
        let mut out: RunConfig = serde_json::from_value(merged)
            .map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        out.config = Some(path);
        Ok(out)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn hash_dim(&self) -> usize {
        self.hash_dim.unwrap_or(DEFAULT_HASH_DIM)
    }

    pub fn intervention_month(&self) -> i64 {
        self.intervention_month
            .unwrap_or(DEFAULT_INTERVENTION_MONTH)
    }

    pub fn grouping(&self) -> Result<Grouping> {
        self.group.as_deref().unwrap_or("all").parse()
    }

    pub fn out_dir(&self) -> Result<&Path> {
        let out = self.out.as_deref().ok_or_else(|| missing("--out"))?;
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        Ok(out)
    }

    pub fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| missing(flag))
    }

    /// Feature source: explicit flag, else embeddings when a file is given, else hashing.
    pub fn feature_source(&self) -> FeatureSource {
        self.features.unwrap_or(if self.embeddings.is_some() {
            FeatureSource::Embeddings
        } else {
            FeatureSource::Hash
        })
    }

    pub fn model_kind(&self) -> Result<ModelKind> {
        let kind = *Self::require(&self.model, "--model")?;
        if kind == ModelKind::EmbedMlp && self.beta.is_some() {
            return Err(Error::InvalidArgument(
                "--beta applies only to --model hdln".into(),
            ));
        }
        if let Some(b) = self.beta {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidArgument(format!("--beta {b} outside [0, 1]")));
            }
        }
        Ok(kind)
    }
}

pub(crate) fn missing(flag: &str) -> Error {
    Error::InvalidArgument(format!("missing required {flag}"))
}
