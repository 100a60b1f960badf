use super::objective::BLOCK_WEIGHTS;
use super::{Classifier, Sample};
use crate::error::{Error, Result};
use crate::metrics::BlockDistributions;
use crate::nn::{softmax, softmax_xent, Mlp, Real};
use crate::rng::{stream_rng, Stream};
use crate::schema::Category;

pub const EMBED_MLP_HIDDEN: usize = 50;

/// One independent two-layer head per label block over a fixed embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbedMlpModel<T> {
    pub heads: Vec<Mlp<T>>,
}

impl<T: Real> EmbedMlpModel<T> {
    pub fn init(input_dim: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Init);
        Self {
            heads: Category::ALL
                .iter()
                .map(|c| Mlp::init(&[input_dim, hidden, c.size()], &mut rng))
                .collect(),
        }
    }

    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self {
            heads: Category::ALL
                .iter()
                .map(|c| Mlp::zeros(&[input_dim, hidden, c.size()]))
                .collect(),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.heads[0].layers[0].out_dim()
    }

    pub fn cast<U: Real>(&self) -> EmbedMlpModel<U> {
        EmbedMlpModel {
            heads: self.heads.iter().map(Mlp::cast).collect(),
        }
    }

    pub fn logits(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        self.heads.iter().map(|h| h.forward(x)).collect()
    }
}

impl<T: Real> Classifier<T> for EmbedMlpModel<T> {
    fn input_dim(&self) -> usize {
        self.heads[0].in_dim()
    }

    fn tensors(&self) -> Vec<&[T]> {
        self.heads.iter().flat_map(Mlp::tensors).collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        self.heads.iter_mut().flat_map(Mlp::tensors_mut).collect()
    }

    fn loss_and_grad(&self, batch: &[Sample<'_, T>]) -> Result<(f64, Vec<Vec<f64>>)> {
        if batch.is_empty() {
            return Err(Error::Empty("empty batch".into()));
        }
        let mut grads: Vec<Mlp<f64>> = self.heads.iter().map(Mlp::zeros_like).collect();
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for sample in batch {
            let mut off = 0;
            for ((head, grad), (c, w)) in self
                .heads
                .iter()
                .zip(grads.iter_mut())
                .zip(Category::ALL.iter().zip(BLOCK_WEIGHTS))
            {
                let k = c.size();
                let target = &sample.target[off..off + k];
                off += k;
                if target.iter().all(|v| *v == 0.0) {
                    continue;
                }
                let (logits, cache) = head.forward_cached(sample.features)?;
                let (l, g) = softmax_xent(&logits, target)?;
                loss += scale * w * l;
                let g: Vec<f64> = g.into_iter().map(|v| scale * w * v).collect();
                head.backward(&cache, &g, grad);
            }
        }
        let flat = grads
            .iter()
            .flat_map(|g| g.tensors().into_iter().map(<[f64]>::to_vec))
            .collect();
        Ok((loss, flat))
    }

    fn predict_blocks(&self, x: &[T], _beta: f64) -> Result<BlockDistributions> {
        Ok(self.logits(x)?.iter().map(|z| softmax(z)).collect())
    }

    fn representation(&self, x: &[T]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|v| v.as_f64()).collect())
    }
}
