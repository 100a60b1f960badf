//! Interrupted time-series segmented regression `Y = b0 + b1 T + b2 D + b3 M + e`,
//! where `D = 1(T ≥ t0)` and `M = max(0, T − t0)` for intervention month `t0`.

use std::path::Path;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::ItsSeries;
use crate::error::{Error, Result};
use crate::io::{csv_err, csv_writer};

/// Month index of March 2020 (months since January 2018).
pub const DEFAULT_INTERVENTION_MONTH: i64 = 26;

pub const TERMS: [&str; 4] = ["b0", "b1", "b2", "b3"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItsFit {
    pub intervention_month: i64,
    /// (b0, b1, b2, b3): intercept, pre-trend, level change, slope change.
    pub coefficients: [f64; 4],
    pub std_errors: [f64; 4],
    pub t_stats: [f64; 4],
    pub p_values: [f64; 4],
    pub ci95: [(f64, f64); 4],
    pub ci90: [(f64, f64); 4],
    pub months: Vec<i64>,
    pub observed: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub df: usize,
}

/// Design row `[1, T, D, M]`.
pub fn design_row(month: i64, intervention_month: i64) -> [f64; 4] {
    let post = month >= intervention_month;
    [
        1.0,
        month as f64,
        if post { 1.0 } else { 0.0 },
        (month - intervention_month).max(0) as f64,
    ]
}

/// Householder QR least squares. Returns (coefficients, R) for an n×p design.
#[allow(clippy::needless_range_loop)]
pub fn least_squares(x: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = x.len();
    let p = x.first().map_or(0, Vec::len);
    if n < p || p == 0 || y.len() != n {
        return Err(Error::Shape(format!("{n} observations for {p} columns")));
    }
    let mut a: Vec<Vec<f64>> = x.to_vec();
    let mut b = y.to_vec();
    let scale = (0..p)
        .map(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    for k in 0..p {
        let norm = (k..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm <= 1e-10 * scale.max(1.0) {
            return Err(Error::RankDeficient(format!(
                "column {k} is (nearly) dependent"
            )));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for j in k..p {
                let s: f64 = (k..n).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vnorm2;
                for i in k..n {
                    a[i][j] -= s * v[i - k];
                }
            }
            let s: f64 = (k..n).map(|i| v[i - k] * b[i]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..n {
                b[i] -= s * v[i - k];
            }
        }
    }
    let r: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| if j >= i { a[i][j] } else { 0.0 }).collect())
        .collect();
    let max_diag = (0..p).map(|i| r[i][i].abs()).fold(0.0, f64::max);
    if let Some(k) = (0..p).find(|&i| r[i][i].abs() <= 1e-10 * max_diag) {
        return Err(Error::RankDeficient(format!(
            "column {k} is (nearly) dependent"
        )));
    }
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = ((i + 1)..p).map(|j| r[i][j] * coef[j]).sum();
        coef[i] = (b[i] - s) / r[i][i];
    }
    Ok((coef, r))
}

/// Inverse of an upper-triangular matrix.
fn invert_upper(r: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = r.len();
    let mut inv = vec![vec![0.0; p]; p];
    for j in 0..p {
        inv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let s: f64 = ((i + 1)..=j).map(|k| r[i][k] * inv[k][j]).sum();
            inv[i][j] = -s / r[i][i];
        }
    }
    inv
}

/// Fits the segmented regression with classical OLS inference on `n − 4` df.
pub fn its_fit(series: &ItsSeries) -> Result<ItsFit> {
    let points: Vec<(i64, f64)> = series.observed().collect();
    let t0 = series.intervention_month;
    if points.len() < 6 {
        return Err(Error::InvalidArgument(format!(
            "need at least 6 observed months, got {}",
            points.len()
        )));
    }
    if !points.iter().any(|(m, _)| *m < t0) || !points.iter().any(|(m, _)| *m >= t0) {
        return Err(Error::RankDeficient(
            "observations must span both sides of the intervention".into(),
        ));
    }
    let x: Vec<Vec<f64>> = points
        .iter()
        .map(|(m, _)| design_row(*m, t0).to_vec())
        .collect();
    let y: Vec<f64> = points.iter().map(|(_, v)| *v).collect();
    let (coef, r) = least_squares(&x, &y)?;

    let fitted: Vec<f64> = x
        .iter()
        .map(|row| row.iter().zip(&coef).map(|(a, b)| a * b).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let n = y.len();
    let df = n - 4;
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };

    let sigma2 = sse / df as f64;
    let rinv = invert_upper(&r);
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::InvalidArgument(format!("t distribution: {e}")))?;
    let q975 = dist.inverse_cdf(0.975);
    let q95 = dist.inverse_cdf(0.95);

    let mut fit = ItsFit {
        intervention_month: t0,
        coefficients: [0.0; 4],
        std_errors: [0.0; 4],
        t_stats: [0.0; 4],
        p_values: [0.0; 4],
        ci95: [(0.0, 0.0); 4],
        ci90: [(0.0, 0.0); 4],
        months: points.iter().map(|(m, _)| *m).collect(),
        observed: y,
        fitted,
        residuals,
        r_squared,
        df,
    };
    for j in 0..4 {
        // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ, so its diagonal is the squared row norm of R⁻¹
        let var = sigma2 * rinv[j].iter().map(|v| v * v).sum::<f64>();
        let se = var.sqrt();
        let b = coef[j];
        let t = if se > 0.0 {
            b / se
        } else if b == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(b)
        };
        let p = if t.is_finite() {
            2.0 * (1.0 - dist.cdf(t.abs()))
        } else {
            0.0
        };
        fit.coefficients[j] = b;
        fit.std_errors[j] = se;
        fit.t_stats[j] = t;
        fit.p_values[j] = p.clamp(0.0, 1.0);
        fit.ci95[j] = (b - q975 * se, b + q975 * se);
        fit.ci90[j] = (b - q95 * se, b + q95 * se);
    }
    Ok(fit)
}

pub fn write_its_csv(path: &Path, fit: &ItsFit) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "term",
        "estimate",
        "std_error",
        "t",
        "p_value",
        "ci95_low",
        "ci95_high",
        "ci90_low",
        "ci90_high",
        "n",
        "df",
        "r_squared",
    ])
    .map_err(|e| csv_err(path, e))?;
    for (j, term) in TERMS.iter().enumerate() {
        w.write_record([
            term.to_string(),
            format!("{:.10}", fit.coefficients[j]),
            format!("{:.10}", fit.std_errors[j]),
            format!("{:.6}", fit.t_stats[j]),
            format!("{:.6}", fit.p_values[j]),
            format!("{:.10}", fit.ci95[j].0),
            format!("{:.10}", fit.ci95[j].1),
            format!("{:.10}", fit.ci90[j].0),
            format!("{:.10}", fit.ci90[j].1),
            fit.observed.len().to_string(),
            fit.df.to_string(),
            format!("{:.6}", fit.r_squared),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Plot-ready series: every month of the input series, with fitted values for observed months.
pub fn write_series_csv(path: &Path, series: &ItsSeries, fit: &ItsFit) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["month", "y", "fitted", "segment", "n_posts"])
        .map_err(|e| csv_err(path, e))?;
    for point in &series.points {
        let fitted = design_row(point.month, fit.intervention_month)
            .iter()
            .zip(&fit.coefficients)
            .map(|(a, b)| a * b)
            .sum::<f64>();
        let segment = if point.month >= fit.intervention_month {
            "post"
        } else {
            "pre"
        };
        w.write_record([
            point.month.to_string(),
            point.value.map_or(String::new(), |v| format!("{v:.10}")),
            format!("{fitted:.10}"),
            segment.to_string(),
            point.n_posts.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::SeriesPoint;

    fn series(values: &[(i64, f64)], t0: i64) -> ItsSeries {
        ItsSeries {
            intervention_month: t0,
            points: values
                .iter()
                .map(|&(month, v)| SeriesPoint {
                    month,
                    value: Some(v),
                    n_posts: 1,
                })
                .collect(),
        }
    }

    #[test]
    fn exact_line_without_break() {
        let pts: Vec<(i64, f64)> = (0..36).map(|t| (t, 2.0 + 0.5 * t as f64)).collect();
        let fit = its_fit(&series(&pts, 26)).unwrap();
        let expected = [2.0, 0.5, 0.0, 0.0];
        for (b, e) in fit.coefficients.iter().zip(expected) {
            assert!((b - e).abs() < 1e-10, "{:?}", fit.coefficients);
        }
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-10));
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[allow(clippy::needless_range_loop)]
    fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let p = x[0].len();
        let mut a = vec![vec![0.0; p + 1]; p];
        for (row, yi) in x.iter().zip(y) {
            for i in 0..p {
                for j in 0..p {
                    a[i][j] += row[i] * row[j];
                }
                a[i][p] += row[i] * yi;
            }
        }
        for c in 0..p {
            let piv = (c..p)
                .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
                .unwrap();
            a.swap(c, piv);
            for r in 0..p {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in c..=p {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        (0..p).map(|i| a[i][p] / a[i][i]).collect()
    }

    #[test]
    fn matches_normal_equations_and_is_orthogonal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pts: Vec<(i64, f64)> = (0..30).map(|t| (t, rng.random_range(0.0..1.0))).collect();
            let fit = its_fit(&series(&pts, 18)).unwrap();
            let x: Vec<Vec<f64>> = pts
                .iter()
                .map(|(m, _)| design_row(*m, 18).to_vec())
                .collect();
            let y: Vec<f64> = pts.iter().map(|(_, v)| *v).collect();
            let oracle = normal_equations(&x, &y);
            for (a, b) in fit.coefficients.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
            for j in 0..4 {
                let dot: f64 = x.iter().zip(&fit.residuals).map(|(r, e)| r[j] * e).sum();
                assert!(dot.abs() < 1e-8);
            }
            assert!((0.0..=1.0).contains(&fit.r_squared));
            for j in 0..4 {
                assert!(fit.ci90[j].0 >= fit.ci95[j].0 && fit.ci90[j].1 <= fit.ci95[j].1);
            }
        }
    }

    #[test]
    fn month_shift_moves_only_intercept() {
        let pts: Vec<(i64, f64)> = (0..36)
            .map(|t| (t, 1.0 + 0.2 * t as f64 + if t >= 26 { 3.0 } else { 0.0 }))
            .collect();
        let base = its_fit(&series(&pts, 26)).unwrap();
        let shifted: Vec<(i64, f64)> = pts.iter().map(|(t, v)| (t + 5, *v)).collect();
        let moved = its_fit(&series(&shifted, 31)).unwrap();
        assert!(
            (moved.coefficients[0] - (base.coefficients[0] - 5.0 * base.coefficients[1])).abs()
                < 1e-8
        );
        for j in 1..4 {
            assert!((moved.coefficients[j] - base.coefficients[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn dropping_break_columns_on_no_break_series() {
        let pts: Vec<(i64, f64)> = (0..36).map(|t| (t, 0.7 - 0.01 * t as f64)).collect();
        let fit = its_fit(&series(&pts, 26)).unwrap();
        let x: Vec<Vec<f64>> = pts.iter().map(|(m, _)| vec![1.0, *m as f64]).collect();
        let y: Vec<f64> = pts.iter().map(|(_, v)| *v).collect();
        let (reduced, _) = least_squares(&x, &y).unwrap();
        assert!((reduced[0] - fit.coefficients[0]).abs() < 1e-8);
        assert!((reduced[1] - fit.coefficients[1]).abs() < 1e-8);
    }

    #[test]
    fn t_quantile_reference() {
        // two-sided 95% critical value for 32 df
        let fit = its_fit(&series(
            &(0..36)
                .map(|t| (t, ((t * 7) % 5) as f64))
                .collect::<Vec<_>>(),
            26,
        ))
        .unwrap();
        let half = (fit.ci95[1].1 - fit.ci95[1].0) / 2.0;
        assert!((half / fit.std_errors[1] - 2.036933).abs() < 1e-5);
    }

    #[test]
    fn design_columns() {
        assert_eq!(design_row(25, 26), [1.0, 25.0, 0.0, 0.0]);
        assert_eq!(design_row(26, 26), [1.0, 26.0, 1.0, 0.0]);
        assert_eq!(design_row(30, 26), [1.0, 30.0, 1.0, 4.0]);
    }

    #[test]
    fn requires_both_segments() {
        let pre_only: Vec<(i64, f64)> = (0..10).map(|t| (t, t as f64)).collect();
        assert!(matches!(
            its_fit(&series(&pre_only, 26)),
            Err(Error::RankDeficient(_))
        ));
        // a single post-intervention month leaves M identically zero
        let mut one_post: Vec<(i64, f64)> = (20..26).map(|t| (t, 0.1 * t as f64)).collect();
        one_post.push((26, 5.0));
        assert!(matches!(
            its_fit(&series(&one_post, 26)),
            Err(Error::RankDeficient(_))
        ));
        assert!(its_fit(&series(&[(0, 1.0), (30, 2.0)], 26)).is_err());
    }
}
