use rand::Rng;

use super::Real;
use crate::error::{Error, Result};

/// Affine layer `y = W x + b` with `W` stored row-major as `out × in`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer<T> {
    in_dim: usize,
    out_dim: usize,
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Real> DenseLayer<T> {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weight: vec![T::zero(); in_dim * out_dim],
            bias: vec![T::zero(); out_dim],
        }
    }

    pub fn from_parts(in_dim: usize, out_dim: usize, weight: Vec<T>, bias: Vec<T>) -> Result<Self> {
        if weight.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(Error::Shape(format!(
                "dense {in_dim}->{out_dim}: weight has {} entries, bias {}",
                weight.len(),
                bias.len()
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weight,
            bias,
        })
    }

    /// Glorot-uniform weights, zero bias.
    pub fn init<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let mut layer = Self::zeros(in_dim, out_dim);
        glorot_uniform(&mut layer.weight, in_dim, out_dim, rng);
        layer
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn zeros_like(&self) -> DenseLayer<f64> {
        DenseLayer::zeros(self.in_dim, self.out_dim)
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.in_dim {
            return Err(Error::Shape(format!(
                "dense layer expects input dim {}, got {}",
                self.in_dim,
                x.len()
            )));
        }
        Ok(self
            .weight
            .chunks_exact(self.in_dim)
            .zip(&self.bias)
            .map(|(row, b)| {
                let acc = row
                    .iter()
                    .zip(x)
                    .fold(b.as_f64(), |acc, (w, xi)| acc + w.as_f64() * xi.as_f64());
                T::from_f64(acc)
            })
            .collect())
    }

    /// Accumulates `dL/dW`, `dL/db` into `grads` and returns `dL/dx`.
    pub fn backward(&self, x: &[T], grad_out: &[f64], grads: &mut DenseLayer<f64>) -> Vec<f64> {
        debug_assert_eq!(grad_out.len(), self.out_dim);
        debug_assert_eq!(x.len(), self.in_dim);
        let mut grad_in = vec![0.0; self.in_dim];
        for (o, &g) in grad_out.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            grads.bias[o] += g;
            let row = &self.weight[o * self.in_dim..(o + 1) * self.in_dim];
            let grow = &mut grads.weight[o * self.in_dim..(o + 1) * self.in_dim];
            for i in 0..self.in_dim {
                grow[i] += g * x[i].as_f64();
                grad_in[i] += g * row[i].as_f64();
            }
        }
        grad_in
    }

    pub fn tensors(&self) -> [&[T]; 2] {
        [&self.weight, &self.bias]
    }

    pub fn tensors_mut(&mut self) -> [&mut [T]; 2] {
        [&mut self.weight, &mut self.bias]
    }

    pub fn cast<U: Real>(&self) -> DenseLayer<U> {
        DenseLayer {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            weight: self
                .weight
                .iter()
                .map(|v| U::from_f64(v.as_f64()))
                .collect(),
            bias: self.bias.iter().map(|v| U::from_f64(v.as_f64())).collect(),
        }
    }
}

/// Fills `w` from uniform(−a, a) with `a = sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform<T: Real, R: Rng + ?Sized>(
    w: &mut [T],
    fan_in: usize,
    fan_out: usize,
    rng: &mut R,
) {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for v in w {
        *v = T::from_f64(rng.random_range(-a..a));
    }
}

pub(crate) fn relu<T: Real>(z: &[T]) -> Vec<T> {
    z.iter()
        .map(|&v| if v > T::zero() { v } else { T::zero() })
        .collect()
}

pub(crate) fn relu_backward<T: Real>(z: &[T], grad: &mut [f64]) {
    for (g, v) in grad.iter_mut().zip(z) {
        if *v <= T::zero() {
            *g = 0.0;
        }
    }
}

/// Stack of dense layers with ReLU between them (none after the last).
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<T> {
    pub layers: Vec<DenseLayer<T>>,
}

/// Per-layer inputs and pre-activations kept from the forward pass.
#[derive(Clone, Debug)]
pub struct MlpCache<T> {
    inputs: Vec<Vec<T>>,
    pre: Vec<Vec<T>>,
}

impl<T: Real> Mlp<T> {
    /// Layer widths `dims[0] → dims[1] → … → dims[n]`.
    pub fn init<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        Self {
            layers: dims
                .windows(2)
                .map(|w| DenseLayer::init(w[0], w[1], rng))
                .collect(),
        }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        Self {
            layers: dims
                .windows(2)
                .map(|w| DenseLayer::zeros(w[0], w[1]))
                .collect(),
        }
    }

    pub fn zeros_like(&self) -> Mlp<f64> {
        Mlp {
            layers: self.layers.iter().map(DenseLayer::zeros_like).collect(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.layers.first().map_or(0, DenseLayer::in_dim)
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, DenseLayer::out_dim)
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.forward_cached(x)?.0)
    }

    pub fn forward_cached(&self, x: &[T]) -> Result<(Vec<T>, MlpCache<T>)> {
        let mut cache = MlpCache {
            inputs: Vec::with_capacity(self.layers.len()),
            pre: Vec::with_capacity(self.layers.len()),
        };
        let mut h = x.to_vec();
        let last = self.layers.len().saturating_sub(1);
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&h)?;
            let next = if i < last { relu(&z) } else { z.clone() };
            cache.inputs.push(std::mem::replace(&mut h, next));
            cache.pre.push(z);
        }
        Ok((h, cache))
    }

    /// Backpropagates `grad_logits` and returns the gradient w.r.t. the input.
    pub fn backward(
        &self,
        cache: &MlpCache<T>,
        grad_logits: &[f64],
        grads: &mut Mlp<f64>,
    ) -> Vec<f64> {
        let mut g = grad_logits.to_vec();
        let last = self.layers.len().saturating_sub(1);
        for i in (0..self.layers.len()).rev() {
            if i < last {
                relu_backward(&cache.pre[i], &mut g);
            }
            g = self.layers[i].backward(&cache.inputs[i], &g, &mut grads.layers[i]);
        }
        g
    }

    pub fn tensors(&self) -> Vec<&[T]> {
        self.layers.iter().flat_map(DenseLayer::tensors).collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(DenseLayer::tensors_mut)
            .collect()
    }

    pub fn cast<U: Real>(&self) -> Mlp<U> {
        Mlp {
            layers: self.layers.iter().map(DenseLayer::cast).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn identity_layer_passes_input() {
        let mut layer = DenseLayer::<f64>::zeros(3, 3);
        for i in 0..3 {
            layer.weight[i * 3 + i] = 1.0;
        }
        assert_eq!(
            layer.forward(&[1.5, -2.0, 0.25]).unwrap(),
            vec![1.5, -2.0, 0.25]
        );
    }

    #[test]
    fn zero_input_zero_bias_gives_zero_logits() {
        let mlp = Mlp::<f32>::init(&[4, 6, 3], &mut stream_rng(1, Stream::Init));
        assert_eq!(mlp.forward(&[0.0; 4]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn hand_multiplied_2x2() {
        // W = [[1, 2], [3, 4]], b = [0.5, -1], x = [2, -1]
        let layer =
            DenseLayer::from_parts(2, 2, vec![1.0, 2.0, 3.0, 4.0], vec![0.5, -1.0]).unwrap();
        assert_eq!(layer.forward(&[2.0f64, -1.0]).unwrap(), vec![0.5, 1.0]);
    }

    #[test]
    fn shape_mismatch() {
        let layer = DenseLayer::<f32>::zeros(3, 2);
        assert!(matches!(layer.forward(&[1.0, 2.0]), Err(Error::Shape(_))));
        assert!(DenseLayer::<f32>::from_parts(2, 2, vec![0.0; 3], vec![0.0; 2]).is_err());
    }

    #[test]
    fn glorot_bound() {
        let layer = DenseLayer::<f64>::init(10, 5, &mut stream_rng(3, Stream::Init));
        let a = (6.0f64 / 15.0).sqrt();
        assert!(layer.weight.iter().all(|w| w.abs() < a));
        assert!(layer.bias.iter().all(|b| *b == 0.0));
    }
}
