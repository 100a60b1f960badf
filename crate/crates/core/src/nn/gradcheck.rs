use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradCheckOptions {
    /// Coordinates checked per tensor; tensors at most this long are checked in full.
    pub samples_per_tensor: usize,
    /// Step scale: `h = step · max(1, |θ|)`.
    pub step: f64,
    /// Lower bound on the relative-error denominator, so coordinates whose
    /// true gradient is ~0 are judged by absolute error against this floor.
    pub denominator_floor: f64,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        Self {
            samples_per_tensor: 64,
            step: 1e-5,
            denominator_floor: 1e-5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// (tensor, index) of the worst coordinate.
    pub worst: Option<(usize, usize)>,
    pub analytic_at_worst: f64,
    pub numeric_at_worst: f64,
    pub coordinates_checked: usize,
    /// Largest gap between forward and backward one-sided differences. It is
    /// O(h·|f''|) where the loss is smooth and O(1) in the slope jump when a
    /// perturbation straddles a kink such as a ReLU switching on or off.
    pub max_one_sided_gap: f64,
}

/// Compares `analytic` against central differences of `loss` at `params`.
pub fn grad_check<F>(
    mut loss: F,
    params: &[Vec<f64>],
    analytic: &[Vec<f64>],
    opts: &GradCheckOptions,
) -> Result<GradCheckReport>
where
    F: FnMut(&[Vec<f64>]) -> Result<f64>,
{
    if params.len() != analytic.len()
        || params.iter().zip(analytic).any(|(p, a)| p.len() != a.len())
    {
        return Err(Error::Shape(
            "analytic gradient is not shaped like params".into(),
        ));
    }
    let base = loss(params)?;
    if !base.is_finite() {
        return Err(Error::NonFinite(format!("loss {base} at the check point")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut work = params.to_vec();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
        analytic_at_worst: 0.0,
        numeric_at_worst: 0.0,
        coordinates_checked: 0,
        max_one_sided_gap: 0.0,
    };
    for t in 0..params.len() {
        let n = params[t].len();
        let coords: Vec<usize> = if n <= opts.samples_per_tensor {
            (0..n).collect()
        } else {
            let mut c = sample(&mut rng, n, opts.samples_per_tensor).into_vec();
            c.sort_unstable();
            c
        };
        for i in coords {
            let theta = params[t][i];
            let h = opts.step * theta.abs().max(1.0);
            work[t][i] = theta + h;
            let plus = loss(&work)?;
            work[t][i] = theta - h;
            let minus = loss(&work)?;
            work[t][i] = theta;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NonFinite(format!("loss near tensor {t} index {i}")));
            }
            let numeric = (plus - minus) / (2.0 * h);
            let gap = ((plus - base) - (base - minus)).abs() / h;
            report.max_one_sided_gap = report.max_one_sided_gap.max(gap);
            let a = analytic[t][i];
            let denom = a.abs().max(numeric.abs()).max(opts.denominator_floor);
            let rel = (a - numeric).abs() / denom;
            report.coordinates_checked += 1;
            if rel > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = rel;
                report.worst = Some((t, i));
                report.analytic_at_worst = a;
                report.numeric_at_worst = numeric;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_at_three() {
        let report = grad_check(
            |p| Ok(p[0][0] * p[0][0]),
            &[vec![3.0]],
            &[vec![6.0]],
            &GradCheckOptions::default(),
        )
        .unwrap();
        assert!(report.max_rel_error < 1e-9, "{report:?}");
    }

    #[test]
    fn catches_a_wrong_gradient() {
        let report = grad_check(
            |p| Ok(p[0].iter().map(|v| v.sin()).sum()),
            &[vec![0.1, 0.2, 0.3]],
            &[vec![0.1f64.cos(), 0.2f64.cos(), 0.0]],
            &GradCheckOptions::default(),
        )
        .unwrap();
        assert_eq!(report.worst, Some((0, 2)));
        assert!(report.max_rel_error > 0.5);
    }

    #[test]
    fn samples_large_tensors() {
        let params = vec![vec![0.5; 1000]];
        let grads = vec![vec![1.0; 1000]];
        let report = grad_check(
            |p| Ok(p[0].iter().sum()),
            &params,
            &grads,
            &GradCheckOptions::default(),
        )
        .unwrap();
        assert_eq!(report.coordinates_checked, 64);
    }

    #[test]
    fn non_finite_loss_is_an_error() {
        let r = grad_check(
            |_| Ok(f64::NAN),
            &[vec![1.0]],
            &[vec![0.0]],
            &GradCheckOptions::default(),
        );
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
