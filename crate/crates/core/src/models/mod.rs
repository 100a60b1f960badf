//! Distributional classifiers over post embeddings.

mod checkpoint;
mod embed_mlp;
mod hdln;
mod objective;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use checkpoint::{
    load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint,
    CHECKPOINT_VERSION,
};
pub use embed_mlp::{EmbedMlpModel, EMBED_MLP_HIDDEN};
pub use hdln::{HdlnModel, HDLN_GLOBAL_HIDDEN, HDLN_LOCAL_HIDDEN};
pub use objective::{
    blend, cross_entropy, hdl_objective, hdln_loss, objective_terms, HdlnPrediction, BLOCK_WEIGHTS,
};
pub use train::{train, validation_accuracy, EpochLog, TrainConfig, TrainOutcome};

use crate::error::{Error, Result};
use crate::metrics::BlockDistributions;
use crate::nn::Real;

/// One training example as seen by a model: features and the flat 21-dim target.
#[derive(Clone, Copy, Debug)]
pub struct Sample<'a, T> {
    pub features: &'a [T],
    pub target: &'a [f64],
}

/// Shared surface of both model families.
pub trait Classifier<T: Real>: Clone {
    fn input_dim(&self) -> usize;
    /// Parameter tensors in declaration order.
    fn tensors(&self) -> Vec<&[T]>;
    fn tensors_mut(&mut self) -> Vec<&mut [T]>;
    /// Mean batch loss and its gradient, shaped like [`Classifier::tensors`].
    fn loss_and_grad(&self, batch: &[Sample<'_, T>]) -> Result<(f64, Vec<Vec<f64>>)>;
    /// Final per-block distributions. `beta` is ignored by models without a blend.
    fn predict_blocks(&self, x: &[T], beta: f64) -> Result<BlockDistributions>;
    /// Hidden representation exported for external projection.
    fn representation(&self, x: &[T]) -> Result<Vec<f64>>;

    fn tensor_shapes(&self) -> Vec<usize> {
        self.tensors().iter().map(|t| t.len()).collect()
    }

    fn load_tensors(&mut self, values: &[Vec<T>]) -> Result<()> {
        let mut slots = self.tensors_mut();
        if slots.len() != values.len() {
            return Err(Error::Shape(format!(
                "model has {} tensors, got {}",
                slots.len(),
                values.len()
            )));
        }
        for (i, (slot, v)) in slots.iter_mut().zip(values).enumerate() {
            if slot.len() != v.len() {
                return Err(Error::Shape(format!(
                    "tensor {i} has {} entries, got {}",
                    slot.len(),
                    v.len()
                )));
            }
            slot.copy_from_slice(v);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    EmbedMlp,
    Hdln,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::EmbedMlp => "embed-mlp",
            ModelKind::Hdln => "hdln",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "embed-mlp" => Ok(ModelKind::EmbedMlp),
            "hdln" => Ok(ModelKind::Hdln),
            other => Err(Error::InvalidArgument(format!(
                "unknown model kind {other:?}"
            ))),
        }
    }
}

/// A trained model of either family, in training precision.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    EmbedMlp(EmbedMlpModel<f32>),
    Hdln(HdlnModel<f32>),
}

/// Output for one post.
#[derive(Clone, Debug, PartialEq)]
pub enum Prediction {
    EmbedMlp(BlockDistributions),
    Hdln(HdlnPrediction),
}

impl Prediction {
    /// Final distributions: the head outputs, or the blend for HDLN.
    pub fn blocks(&self) -> &BlockDistributions {
        match self {
            Prediction::EmbedMlp(b) => b,
            Prediction::Hdln(p) => &p.blended,
        }
    }

    pub fn predicted_lonely(&self) -> bool {
        let lonely = &self.blocks()[0];
        lonely[1] > lonely[0]
    }
}

impl Model {
    pub fn init(kind: ModelKind, input_dim: usize, seed: u64) -> Self {
        match kind {
            ModelKind::EmbedMlp => {
                Model::EmbedMlp(EmbedMlpModel::init(input_dim, EMBED_MLP_HIDDEN, seed))
            }
            ModelKind::Hdln => Model::Hdln(HdlnModel::init(
                input_dim,
                HDLN_GLOBAL_HIDDEN,
                HDLN_LOCAL_HIDDEN,
                seed,
            )),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::EmbedMlp(_) => ModelKind::EmbedMlp,
            Model::Hdln(_) => ModelKind::Hdln,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::EmbedMlp(m) => m.input_dim(),
            Model::Hdln(m) => m.input_dim(),
        }
    }

    pub fn tensors(&self) -> Vec<&[f32]> {
        match self {
            Model::EmbedMlp(m) => m.tensors(),
            Model::Hdln(m) => m.tensors(),
        }
    }

    /// Predicts one post. `beta` is required for HDLN and rejected for EmbedMlp.
    pub fn predict(&self, x: &[f32], beta: Option<f64>) -> Result<Prediction> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "model expects {}-dim features, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        match (self, beta) {
            (Model::EmbedMlp(m), None) => Ok(Prediction::EmbedMlp(m.predict_blocks(x, 0.0)?)),
            (Model::EmbedMlp(_), Some(_)) => Err(Error::InvalidArgument(
                "beta applies only to the hdln model".into(),
            )),
            (Model::Hdln(m), beta) => Ok(Prediction::Hdln(m.predict(x, beta.unwrap_or(0.0))?)),
        }
    }

    pub fn predict_all(&self, features: &[&[f32]], beta: Option<f64>) -> Result<Vec<Prediction>> {
        features.iter().map(|x| self.predict(x, beta)).collect()
    }

    pub fn representation(&self, x: &[f32]) -> Result<Vec<f64>> {
        match self {
            Model::EmbedMlp(m) => m.representation(x),
            Model::Hdln(m) => m.representation(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{grad_check, GradCheckOptions};
    use crate::schema::{Category, PostLabelSet};
    use rand::{Rng, SeedableRng};

    fn random_targets(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                if i % 3 == 2 {
                    return PostLabelSet::nonlonely().to_flat();
                }
                let mut flat = Vec::new();
                for c in Category::ALL {
                    let raw: Vec<f64> = (0..c.size()).map(|_| rng.random_range(0.0..1.0)).collect();
                    let s: f64 = raw.iter().sum();
                    flat.extend(raw.iter().map(|v| v / s));
                }
                flat
            })
            .collect()
    }

    fn random_features(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    }

    fn check<M: Classifier<f64>>(model: M, dim: usize) -> f64 {
        let xs = random_features(5, dim, 1);
        let ts = random_targets(5, 2);
        let batch: Vec<Sample<f64>> = xs
            .iter()
            .zip(&ts)
            .map(|(x, t)| Sample {
                features: x,
                target: t,
            })
            .collect();
        let (_, analytic) = model.loss_and_grad(&batch).unwrap();
        let params: Vec<Vec<f64>> = model.tensors().iter().map(|t| t.to_vec()).collect();
        let mut probe = model.clone();
        let report = grad_check(
            |p| {
                probe.load_tensors(p)?;
                Ok(probe.loss_and_grad(&batch)?.0)
            },
            &params,
            &analytic,
            &GradCheckOptions::default(),
        )
        .unwrap();
        report.max_rel_error
    }

    #[test]
    fn embed_mlp_gradients() {
        let err = check(EmbedMlpModel::<f64>::init(12, 9, 5), 12);
        assert!(err < 1e-4, "max rel error {err}");
    }

    #[test]
    fn hdln_gradients() {
        let err = check(HdlnModel::<f64>::init(10, 8, 7, 5), 10);
        assert!(err < 1e-4, "max rel error {err}");
    }

    #[test]
    fn loss_matches_objective_on_predictions() {
        let model = HdlnModel::<f64>::init(6, 5, 4, 9);
        let xs = random_features(4, 6, 3);
        let ts = random_targets(4, 4);
        let batch: Vec<Sample<f64>> = xs
            .iter()
            .zip(&ts)
            .map(|(x, t)| Sample {
                features: x,
                target: t,
            })
            .collect();
        let (loss, _) = model.loss_and_grad(&batch).unwrap();
        let targets: Vec<PostLabelSet> = ts
            .iter()
            .map(|t| PostLabelSet::from_flat(t).unwrap())
            .collect();
        let preds: Vec<HdlnPrediction> =
            xs.iter().map(|x| model.predict(x, 0.5).unwrap()).collect();
        assert!((loss - hdln_loss(&targets, &preds).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn output_shapes_and_normalization() {
        let model = Model::init(ModelKind::Hdln, 16, 3);
        let x: Vec<f32> = (0..16).map(|i| (i as f32 * 0.3).cos()).collect();
        let Prediction::Hdln(p) = model.predict(&x, Some(0.25)).unwrap() else {
            panic!("expected hdln prediction");
        };
        let dims: Vec<usize> = p.local.iter().map(Vec::len).collect();
        assert_eq!(dims, vec![2, 4, 5, 5, 5]);
        for block in p.local.iter().chain(&p.global).chain(&p.blended) {
            assert!(block.iter().all(|v| *v >= 0.0));
            assert!((block.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let Model::Hdln(inner) = &model else {
            unreachable!()
        };
        assert_eq!(inner.logits(&x).unwrap().1.len(), 21);
    }

    #[test]
    fn beta_rejected_for_embed_mlp() {
        let model = Model::init(ModelKind::EmbedMlp, 4, 1);
        assert!(model.predict(&[0.0; 4], Some(0.5)).is_err());
        assert!(model.predict(&[0.0; 3], None).is_err());
        assert!(model.predict(&[0.0; 4], None).is_ok());
    }
}
