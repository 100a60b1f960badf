use serde::{Deserialize, Serialize};

use super::Real;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.0,
        }
    }
}

/// AdamW with bias correction and decoupled weight decay. Moments are kept in f64.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamW {
    pub config: AdamWConfig,
    step_count: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamW {
    /// Creates state shaped like `shapes` (one length per parameter tensor).
    pub fn new(config: AdamWConfig, shapes: &[usize]) -> Self {
        Self {
            config,
            step_count: 0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn step<T: Real>(
        &mut self,
        params: Vec<&mut [T]>,
        grads: &[&[f64]],
        lr: f64,
    ) -> Result<()> {
        if !(lr >= 0.0 && lr.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate {lr}")));
        }
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "optimizer holds {} tensors, got {} params and {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != self.m[i].len() || g.len() != self.m[i].len() {
                return Err(Error::Shape(format!(
                    "tensor {i}: param/grad length mismatch"
                )));
            }
            if let Some(bad) = g.iter().find(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("gradient {bad} in tensor {i}")));
            }
        }

        self.step_count += 1;
        let AdamWConfig {
            beta1,
            beta2,
            eps,
            weight_decay,
        } = self.config;
        let t = self.step_count as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for ((p, g), (m, v)) in params
            .into_iter()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            for j in 0..p.len() {
                let gj = g[j];
                m[j] = beta1 * m[j] + (1.0 - beta1) * gj;
                v[j] = beta2 * v[j] + (1.0 - beta2) * gj * gj;
                let m_hat = m[j] / bc1;
                let v_hat = v[j] / bc2;
                let mut theta = p[j].as_f64();
                theta -= lr * weight_decay * theta;
                theta -= lr * m_hat / (v_hat.sqrt() + eps);
                p[j] = T::from_f64(theta);
            }
        }
        Ok(())
    }
}

/// Linear warmup from 0 to `base_lr`, then linear decay to 0 at `total_steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub base_lr: f64,
    pub warmup_ratio: f64,
    pub total_steps: u64,
}

impl LrSchedule {
    pub fn new(base_lr: f64, warmup_ratio: f64, total_steps: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&warmup_ratio) {
            return Err(Error::InvalidArgument(format!(
                "warmup ratio {warmup_ratio} outside [0, 1)"
            )));
        }
        if total_steps == 0 {
            return Err(Error::InvalidArgument(
                "total_steps must be at least 1".into(),
            ));
        }
        if !(base_lr >= 0.0 && base_lr.is_finite()) {
            return Err(Error::InvalidArgument(format!("base lr {base_lr}")));
        }
        Ok(Self {
            base_lr,
            warmup_ratio,
            total_steps,
        })
    }

    /// `⌈warmup_ratio · total_steps⌉`, ignoring float noise in the product.
    pub fn warmup_steps(&self) -> u64 {
        let raw = self.warmup_ratio * self.total_steps as f64;
        ((raw - 1e-9).ceil().max(0.0) as u64).min(self.total_steps)
    }

    pub fn lr_at(&self, step: u64) -> Result<f64> {
        if step > self.total_steps {
            return Err(Error::InvalidArgument(format!(
                "step {step} beyond total {}",
                self.total_steps
            )));
        }
        let warmup = self.warmup_steps();
        if step < warmup {
            return Ok(self.base_lr * step as f64 / warmup as f64);
        }
        if step == self.total_steps {
            return Ok(0.0);
        }
        let decay = (self.total_steps - warmup) as f64;
        Ok(self.base_lr * (self.total_steps - step) as f64 / decay)
    }
}
