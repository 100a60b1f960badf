use super::Real;
use crate::error::{Error, Result};

/// Max-shifted softmax, computed in f64.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<f64> {
    let max = logits
        .iter()
        .map(|v| v.as_f64())
        .fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v.as_f64() - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Cross-entropy of `target` against `softmax(logits)` and its logit gradient.
///
/// The gradient is `(Σ p)·q − p`: `q − p` for a distribution and exactly zero
/// for an all-zero target.
pub fn softmax_xent<T: Real>(logits: &[T], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    if logits.len() != target.len() {
        return Err(Error::Shape(format!(
            "{} logits for a {}-way target",
            logits.len(),
            target.len()
        )));
    }
    if let Some(z) = logits.iter().find(|z| !z.is_finite()) {
        return Err(Error::NonFinite(format!("logit {z:?}")));
    }
    let z: Vec<f64> = logits.iter().map(|v| v.as_f64()).collect();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum_exp: f64 = z.iter().map(|v| (v - max).exp()).sum();
    let log_norm = max + sum_exp.ln();
    let mass: f64 = target.iter().sum();
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(z.len());
    for (zk, &pk) in z.iter().zip(target) {
        let log_q = zk - log_norm;
        if pk != 0.0 {
            loss -= pk * log_q;
        }
        grad.push(mass * log_q.exp() - pk);
    }
    Ok((loss, grad))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockLoss {
    /// Cross-entropy per block, in block order.
    pub losses: Vec<f64>,
    /// Gradient w.r.t. the concatenated logits.
    pub grad: Vec<f64>,
}

/// Applies [`softmax_xent`] block by block over concatenated logits.
pub fn blockwise_softmax_xent<T: Real>(
    logits: &[T],
    target: &[f64],
    block_sizes: &[usize],
) -> Result<BlockLoss> {
    let total: usize = block_sizes.iter().sum();
    if logits.len() != total || target.len() != total {
        return Err(Error::Shape(format!(
            "blocks cover {total} entries, got {} logits and {} targets",
            logits.len(),
            target.len()
        )));
    }
    let mut out = BlockLoss {
        losses: Vec::with_capacity(block_sizes.len()),
        grad: Vec::with_capacity(total),
    };
    let mut off = 0;
    for &k in block_sizes {
        let (loss, grad) = softmax_xent(&logits[off..off + k], &target[off..off + k])?;
        out.losses.push(loss);
        out.grad.extend(grad);
        off += k;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{grad_check, GradCheckOptions};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn binary_uniform_logits() {
        let (loss, grad) = softmax_xent(&[0.0f64, 0.0], &[1.0, 0.0]).unwrap();
        assert!((loss - LN_2).abs() < 1e-15);
        assert_eq!(grad, vec![-0.5, 0.5]);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn zero_target_contributes_nothing() {
        let (loss, grad) = softmax_xent(&[1.3f64, -0.2, 4.0, 0.0], &[0.0; 4]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn soft_target_equal_logits() {
        let (loss, _) = softmax_xent(&[0.7f64, 0.7], &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((loss - LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_and_mismatch() {
        assert!(matches!(
            softmax_xent(&[f64::NAN, 0.0], &[1.0, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            softmax_xent(&[f32::INFINITY, 0.0], &[1.0, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(softmax_xent(&[0.0f64], &[1.0, 0.0]).is_err());
        assert!(blockwise_softmax_xent(&[0.0f64; 3], &[0.0; 3], &[2, 2]).is_err());
    }

    #[test]
    fn large_logits_are_stable() {
        let (loss, grad) = softmax_xent(&[1000.0f64, 0.0], &[0.0, 1.0]).unwrap();
        assert!((loss - 1000.0).abs() < 1e-9);
        assert!(grad.iter().all(|g| g.is_finite()));
    }

    #[test]
    fn blockwise_gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let sizes = [2usize, 4, 5, 5, 5];
        for _ in 0..5 {
            let logits: Vec<f64> = (0..21).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut target = Vec::new();
            for (b, &k) in sizes.iter().enumerate() {
                let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
                let s: f64 = raw.iter().sum();
                // every other draw leaves a fine-grained block all-zero
                if b == 3 && rng.random_bool(0.5) {
                    target.extend(std::iter::repeat_n(0.0, k));
                } else {
                    target.extend(raw.iter().map(|v| v / s));
                }
            }
            let analytic = blockwise_softmax_xent(&logits, &target, &sizes)
                .unwrap()
                .grad;
            let report = grad_check(
                |p: &[Vec<f64>]| {
                    let l = blockwise_softmax_xent(&p[0], &target, &sizes)?;
                    Ok(l.losses.iter().sum())
                },
                std::slice::from_ref(&logits),
                &[analytic],
                &GradCheckOptions::default(),
            )
            .unwrap();
            assert!(report.max_rel_error < 1e-6, "{report:?}");
        }
    }

    fn dist(k: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, k).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn softmax_is_positive_and_normalized(z in prop::collection::vec(-50.0f64..50.0, 1..8)) {
            let q = softmax(&z);
            prop_assert!(q.iter().all(|v| *v > 0.0));
            prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn cross_entropy_exceeds_entropy(p in dist(5), z in prop::collection::vec(-5.0f64..5.0, 5)) {
            let (ce, _) = softmax_xent(&z, &p).unwrap();
            let entropy: f64 = -p.iter().map(|v| v * v.ln()).sum::<f64>();
            prop_assert!(ce - entropy >= -1e-12);
            // logits equal to log p reproduce p exactly: KL = 0
            let exact: Vec<f64> = p.iter().map(|v| v.ln()).collect();
            let (ce_exact, _) = softmax_xent(&exact, &p).unwrap();
            prop_assert!((ce_exact - entropy).abs() < 1e-9);
        }
    }
}
