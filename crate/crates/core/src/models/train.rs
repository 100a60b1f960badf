use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Classifier, EmbedMlpModel, HdlnModel, Model, ModelKind, Sample};
use super::{EMBED_MLP_HIDDEN, HDLN_GLOBAL_HIDDEN, HDLN_LOCAL_HIDDEN};
use crate::corpus::LabeledExample;
use crate::error::{Error, Result};
use crate::metrics::{binary_from_blocks, dist_accuracy, BlockDistributions};
use crate::nn::{AdamW, AdamWConfig, LrSchedule};
use crate::rng::{stream_rng, Stream};
use crate::schema::{Category, PostLabelSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub base_lr: f64,
    pub warmup_ratio: f64,
    pub weight_decay: f64,
    pub seed: u64,
    /// Epochs without an improvement before stopping. An epoch improves when
    /// validation accuracy rises, or stays equal while validation loss falls.
    pub patience: usize,
    /// Blend coefficient used for HDLN validation accuracy.
    pub beta: f64,
}

impl TrainConfig {
    pub fn for_kind(kind: ModelKind) -> Self {
        Self {
            batch_size: 16,
            epochs: match kind {
                ModelKind::EmbedMlp => 10,
                ModelKind::Hdln => 20,
            },
            base_lr: 2e-5,
            warmup_ratio: 0.1,
            weight_decay: 0.0,
            seed: 0,
            patience: 3,
            beta: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::InvalidArgument(
                "batch size and epochs must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidArgument(format!(
                "beta {} outside [0, 1]",
                self.beta
            )));
        }
        if self.patience == 0 {
            return Err(Error::InvalidArgument("patience must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
    /// Learning rate of the last step in the epoch.
    pub lr: f64,
    pub improved: bool,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters from the best validation epoch.
    pub model: Model,
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    pub stopped_early: bool,
}

/// Accuracy used for early stopping: binary argmax accuracy for HDLN, the
/// mean per-block argmax accuracy for EmbedMlp.
pub fn validation_accuracy(
    kind: ModelKind,
    preds: &[BlockDistributions],
    targets: &[PostLabelSet],
) -> Result<f64> {
    match kind {
        ModelKind::Hdln => Ok(binary_from_blocks(
            preds
                .iter()
                .zip(targets)
                .map(|(p, t)| (p[0].as_slice(), t.lonely.values())),
        )?
        .accuracy),
        ModelKind::EmbedMlp => {
            let mut per_block = Vec::new();
            for c in Category::ALL {
                let mut hits = 0.0;
                let mut n = 0usize;
                for (p, t) in preds.iter().zip(targets) {
                    let target = t.block(c).values();
                    if target.iter().all(|v| *v == 0.0) {
                        continue;
                    }
                    hits += dist_accuracy(&p[c.index()], target)?;
                    n += 1;
                }
                if n > 0 {
                    per_block.push(hits / n as f64);
                }
            }
            if per_block.is_empty() {
                return Err(Error::Empty("no scorable validation targets".into()));
            }
            Ok(per_block.iter().sum::<f64>() / per_block.len() as f64)
        }
    }
}

struct Prepared {
    features: Vec<Vec<f32>>,
    targets: Vec<Vec<f64>>,
    labels: Vec<PostLabelSet>,
}

fn prepare(examples: &[LabeledExample], dim: usize) -> Result<Prepared> {
    let mut out = Prepared {
        features: Vec::with_capacity(examples.len()),
        targets: Vec::with_capacity(examples.len()),
        labels: Vec::with_capacity(examples.len()),
    };
    for ex in examples {
        if ex.features.dim() != dim {
            return Err(Error::MixedDims {
                id: ex.post_id.clone(),
                expected: dim,
                found: ex.features.dim(),
            });
        }
        out.features.push(ex.features.values.clone());
        out.targets.push(ex.labels.to_flat());
        out.labels.push(ex.labels.clone());
    }
    Ok(out)
}

impl Prepared {
    fn samples(&self) -> Vec<Sample<'_, f32>> {
        self.features
            .iter()
            .zip(&self.targets)
            .map(|(f, t)| Sample {
                features: f,
                target: t,
            })
            .collect()
    }
}

/// Trains a model of `kind` with AdamW under the warmup/decay schedule,
/// keeping the parameters of the best validation epoch and stopping after
/// `patience` epochs without improvement.
pub fn train(
    kind: ModelKind,
    train_set: &[LabeledExample],
    val_set: &[LabeledExample],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Empty(
            "training and validation splits must be non-empty".into(),
        ));
    }
    let dim = train_set[0].features.dim();
    let train_data = prepare(train_set, dim)?;
    let val_data = prepare(val_set, dim)?;
    match kind {
        ModelKind::EmbedMlp => {
            let model = EmbedMlpModel::<f32>::init(dim, EMBED_MLP_HIDDEN, config.seed);
            let (best, summary) = fit(model, kind, &train_data, &val_data, config)?;
            Ok(summary.into_outcome(Model::EmbedMlp(best)))
        }
        ModelKind::Hdln => {
            let model =
                HdlnModel::<f32>::init(dim, HDLN_GLOBAL_HIDDEN, HDLN_LOCAL_HIDDEN, config.seed);
            let (best, summary) = fit(model, kind, &train_data, &val_data, config)?;
            Ok(summary.into_outcome(Model::Hdln(best)))
        }
    }
}

struct FitSummary {
    log: Vec<EpochLog>,
    best_epoch: usize,
    best_val_accuracy: f64,
    stopped_early: bool,
}

impl FitSummary {
    fn into_outcome(self, model: Model) -> TrainOutcome {
        TrainOutcome {
            model,
            log: self.log,
            best_epoch: self.best_epoch,
            best_val_accuracy: self.best_val_accuracy,
            stopped_early: self.stopped_early,
        }
    }
}

fn fit<M: Classifier<f32>>(
    mut model: M,
    kind: ModelKind,
    train_data: &Prepared,
    val_data: &Prepared,
    config: &TrainConfig,
) -> Result<(M, FitSummary)> {
    let n = train_data.features.len();
    let steps_per_epoch = n.div_ceil(config.batch_size);
    let schedule = LrSchedule::new(
        config.base_lr,
        config.warmup_ratio,
        (config.epochs * steps_per_epoch) as u64,
    )?;
    let mut optimizer = AdamW::new(
        AdamWConfig {
            weight_decay: config.weight_decay,
            ..AdamWConfig::default()
        },
        &model.tensor_shapes(),
    );
    let mut shuffle_rng = stream_rng(config.seed, Stream::Shuffle);
    let train_samples = train_data.samples();
    let val_samples = val_data.samples();

    let mut order: Vec<usize> = (0..n).collect();
    let mut step: u64 = 0;
    let mut best: Option<(M, usize, f64, f64)> = None;
    let mut since_best = 0;
    let mut log = Vec::new();
    let mut stopped_early = false;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        let mut lr = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<Sample<f32>> = chunk.iter().map(|&i| train_samples[i]).collect();
            let (loss, grads) = model.loss_and_grad(&batch)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "training loss {loss} at epoch {epoch}, step {step}"
                )));
            }
            epoch_loss += loss * chunk.len() as f64;
            lr = schedule.lr_at(step)?;
            let grad_refs: Vec<&[f64]> = grads.iter().map(Vec::as_slice).collect();
            optimizer.step(model.tensors_mut(), &grad_refs, lr)?;
            step += 1;
        }

        let (val_loss, _) = model.loss_and_grad(&val_samples)?;
        let preds = val_data
            .features
            .iter()
            .map(|x| model.predict_blocks(x, config.beta))
            .collect::<Result<Vec<_>>>()?;
        let val_accuracy = validation_accuracy(kind, &preds, &val_data.labels)?;
        let improved = best.as_ref().is_none_or(|(_, _, acc, loss)| {
            val_accuracy > *acc || (val_accuracy == *acc && val_loss < *loss)
        });
        log::info!(
            "epoch {epoch}: train loss {:.6}, val loss {val_loss:.6}, val acc {val_accuracy:.4}",
            epoch_loss / n as f64
        );
        log.push(EpochLog {
            epoch,
            train_loss: epoch_loss / n as f64,
            val_loss,
            val_accuracy,
            lr,
            improved,
        });
        if improved {
            best = Some((model.clone(), epoch, val_accuracy, val_loss));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                stopped_early = epoch < config.epochs;
                break;
            }
        }
    }

    let (best_model, best_epoch, best_val_accuracy, _) = best.expect("at least one epoch ran");
    Ok((
        best_model,
        FitSummary {
            log,
            best_epoch,
            best_val_accuracy,
            stopped_early,
        },
    ))
}
