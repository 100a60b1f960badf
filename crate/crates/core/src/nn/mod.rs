//! Small self-contained numerics for the classifiers: dense layers with ReLU,
//! blockwise softmax cross-entropy, AdamW, the warmup/decay schedule, and a
//! finite-difference gradient checker.
//!
//! Everything is generic over [`Real`] so the same code trains in `f32` and
//! is gradient-checked in `f64`. Reductions always accumulate in `f64`.

mod dense;
mod gradcheck;
mod loss;
mod optim;

pub use dense::{glorot_uniform, DenseLayer, Mlp, MlpCache};
pub use gradcheck::{grad_check, GradCheckOptions, GradCheckReport};
pub use loss::{blockwise_softmax_xent, softmax, softmax_xent, BlockLoss};
pub use optim::{AdamW, AdamWConfig, LrSchedule};

use std::fmt::Debug;

/// Floating-point element type for parameters and activations.
pub trait Real: num_traits::Float + Default + Debug + Send + Sync + 'static {
    fn from_f64(v: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn as_f64(self) -> f64 {
        self
    }
}
