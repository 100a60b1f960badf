//! Hierarchical distributional-label network.
//!
//! Two global levels carry the shared information flow: level 1 reads the
//! embedding, level 2 reads level 1 concatenated with the embedding. The
//! lonely local head sits on level 1; the four fine-grained local heads and
//! the global head sit on level 2. The global head emits all 21 logits,
//! normalized block by block.

use super::objective::{objective_from_logits, HdlnPrediction};
use super::{Classifier, Sample};
use crate::error::{Error, Result};
use crate::metrics::BlockDistributions;
use crate::nn::{softmax, DenseLayer, Mlp, MlpCache, Real};
use crate::rng::{stream_rng, Stream};
use crate::schema::{Category, LabelSchema};

pub const HDLN_GLOBAL_HIDDEN: usize = 64;
pub const HDLN_LOCAL_HIDDEN: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct HdlnModel<T> {
    pub level1: DenseLayer<T>,
    pub level2: DenseLayer<T>,
    /// Local heads in schema order; index 0 is the lonely head.
    pub local: Vec<Mlp<T>>,
    pub global_head: DenseLayer<T>,
}

struct Forward<T> {
    z1: Vec<T>,
    h1: Vec<T>,
    concat: Vec<T>,
    z2: Vec<T>,
    h2: Vec<T>,
    local_logits: Vec<Vec<T>>,
    local_caches: Vec<MlpCache<T>>,
    global_logits: Vec<T>,
}

fn relu<T: Real>(z: &[T]) -> Vec<T> {
    z.iter()
        .map(|&v| if v > T::zero() { v } else { T::zero() })
        .collect()
}

fn mask<T: Real>(z: &[T], g: &mut [f64]) {
    for (gi, zi) in g.iter_mut().zip(z) {
        if *zi <= T::zero() {
            *gi = 0.0;
        }
    }
}

fn split_blocks<T: Real>(flat: &[T]) -> BlockDistributions {
    let mut off = 0;
    Category::ALL
        .iter()
        .map(|c| {
            let block = softmax(&flat[off..off + c.size()]);
            off += c.size();
            block
        })
        .collect()
}

impl<T: Real> HdlnModel<T> {
    pub fn init(input_dim: usize, global_hidden: usize, local_hidden: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Init);
        let level1 = DenseLayer::init(input_dim, global_hidden, &mut rng);
        let level2 = DenseLayer::init(global_hidden + input_dim, global_hidden, &mut rng);
        let local = Category::ALL
            .iter()
            .map(|c| Mlp::init(&[global_hidden, local_hidden, c.size()], &mut rng))
            .collect();
        let global_head =
            DenseLayer::init(global_hidden, LabelSchema::standard().total_dim(), &mut rng);
        Self {
            level1,
            level2,
            local,
            global_head,
        }
    }

    pub fn zeros(input_dim: usize, global_hidden: usize, local_hidden: usize) -> Self {
        Self {
            level1: DenseLayer::zeros(input_dim, global_hidden),
            level2: DenseLayer::zeros(global_hidden + input_dim, global_hidden),
            local: Category::ALL
                .iter()
                .map(|c| Mlp::zeros(&[global_hidden, local_hidden, c.size()]))
                .collect(),
            global_head: DenseLayer::zeros(global_hidden, LabelSchema::standard().total_dim()),
        }
    }

    pub fn global_hidden(&self) -> usize {
        self.level1.out_dim()
    }

    pub fn local_hidden(&self) -> usize {
        self.local[0].layers[0].out_dim()
    }

    pub fn cast<U: Real>(&self) -> HdlnModel<U> {
        HdlnModel {
            level1: self.level1.cast(),
            level2: self.level2.cast(),
            local: self.local.iter().map(Mlp::cast).collect(),
            global_head: self.global_head.cast(),
        }
    }

    fn zeros_like(&self) -> HdlnModel<f64> {
        HdlnModel {
            level1: self.level1.zeros_like(),
            level2: self.level2.zeros_like(),
            local: self.local.iter().map(Mlp::zeros_like).collect(),
            global_head: self.global_head.zeros_like(),
        }
    }

    fn forward(&self, x: &[T]) -> Result<Forward<T>> {
        let z1 = self.level1.forward(x)?;
        let h1 = relu(&z1);
        let concat: Vec<T> = h1.iter().chain(x).copied().collect();
        let z2 = self.level2.forward(&concat)?;
        let h2 = relu(&z2);
        let mut local_logits = Vec::with_capacity(self.local.len());
        let mut local_caches = Vec::with_capacity(self.local.len());
        for (i, head) in self.local.iter().enumerate() {
            let input = if i == 0 { &h1 } else { &h2 };
            let (logits, cache) = head.forward_cached(input)?;
            local_logits.push(logits);
            local_caches.push(cache);
        }
        let global_logits = self.global_head.forward(&h2)?;
        Ok(Forward {
            z1,
            h1,
            concat,
            z2,
            h2,
            local_logits,
            local_caches,
            global_logits,
        })
    }

    /// Local and global distributions and their blend at `beta`.
    pub fn predict(&self, x: &[T], beta: f64) -> Result<HdlnPrediction> {
        let f = self.forward(x)?;
        let local = f.local_logits.iter().map(|z| softmax(z)).collect();
        let global = split_blocks(&f.global_logits);
        HdlnPrediction::new(local, global, beta)
    }

    /// Raw local logits (concatenated) and global logits.
    pub fn logits(&self, x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let f = self.forward(x)?;
        Ok((f.local_logits.concat(), f.global_logits))
    }

    fn grad_model(&self, batch: &[Sample<'_, T>]) -> Result<(f64, HdlnModel<f64>)> {
        if batch.is_empty() {
            return Err(Error::Empty("empty batch".into()));
        }
        let mut grads = self.zeros_like();
        // ½ local + ½ global, averaged over the batch
        let scale = 0.5 / batch.len() as f64;
        let mut loss = 0.0;
        for sample in batch {
            let f = self.forward(sample.features)?;
            let local_flat: Vec<T> = f.local_logits.concat();
            let (l_local, g_local) = objective_from_logits(&local_flat, sample.target, scale)?;
            let (l_global, g_global) =
                objective_from_logits(&f.global_logits, sample.target, scale)?;
            loss += l_local + l_global;

            let mut dh1 = vec![0.0; f.h1.len()];
            let mut dh2 = vec![0.0; f.h2.len()];
            let mut off = 0;
            for (i, head) in self.local.iter().enumerate() {
                let k = head.out_dim();
                let g = &g_local[off..off + k];
                off += k;
                if g.iter().all(|v| *v == 0.0) {
                    continue;
                }
                let d = head.backward(&f.local_caches[i], g, &mut grads.local[i]);
                let acc = if i == 0 { &mut dh1 } else { &mut dh2 };
                for (a, v) in acc.iter_mut().zip(d) {
                    *a += v;
                }
            }
            let d = self
                .global_head
                .backward(&f.h2, &g_global, &mut grads.global_head);
            for (a, v) in dh2.iter_mut().zip(d) {
                *a += v;
            }

            mask(&f.z2, &mut dh2);
            let dconcat = self.level2.backward(&f.concat, &dh2, &mut grads.level2);
            for (a, v) in dh1.iter_mut().zip(&dconcat[..f.h1.len()]) {
                *a += v;
            }
            mask(&f.z1, &mut dh1);
            self.level1
                .backward(sample.features, &dh1, &mut grads.level1);
        }
        Ok((loss, grads))
    }
}

impl<T: Real> Classifier<T> for HdlnModel<T> {
    fn input_dim(&self) -> usize {
        self.level1.in_dim()
    }

    fn tensors(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = Vec::new();
        out.extend(self.level1.tensors());
        out.extend(self.level2.tensors());
        for head in &self.local {
            out.extend(head.tensors());
        }
        out.extend(self.global_head.tensors());
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = Vec::new();
        out.extend(self.level1.tensors_mut());
        out.extend(self.level2.tensors_mut());
        for head in &mut self.local {
            out.extend(head.tensors_mut());
        }
        out.extend(self.global_head.tensors_mut());
        out
    }

    fn loss_and_grad(&self, batch: &[Sample<'_, T>]) -> Result<(f64, Vec<Vec<f64>>)> {
        let (loss, grads) = self.grad_model(batch)?;
        Ok((
            loss,
            grads.tensors().into_iter().map(<[f64]>::to_vec).collect(),
        ))
    }

    fn predict_blocks(&self, x: &[T], beta: f64) -> Result<BlockDistributions> {
        Ok(self.predict(x, beta)?.blended)
    }

    fn representation(&self, x: &[T]) -> Result<Vec<f64>> {
        Ok(self.forward(x)?.h2.iter().map(|v| v.as_f64()).collect())
    }
}
