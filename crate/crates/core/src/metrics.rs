//! Binary classification metrics and label-distribution comparison metrics.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{csv_err, csv_writer};
use crate::schema::{Category, PostLabelSet};

/// Equal-within-this counts as a tie when forming a target's argmax set.
const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// All indices attaining the maximum.
pub fn argmax_set(values: &[f64]) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| max - **v <= TIE_TOLERANCE)
        .map(|(i, _)| i)
        .collect()
}

fn same_dim(target: &[f64], pred: &[f64]) -> Result<()> {
    if target.len() != pred.len() || target.is_empty() {
        return Err(Error::Shape(format!(
            "distribution dims {} and {}",
            target.len(),
            pred.len()
        )));
    }
    Ok(())
}

/// 1 when the predicted argmax is one of the target's argmax indices.
pub fn dist_accuracy(pred: &[f64], target: &[f64]) -> Result<f64> {
    same_dim(target, pred)?;
    if target.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidArgument(
            "all-zero target has no argmax".into(),
        ));
    }
    Ok(f64::from(u8::from(
        argmax_set(target).contains(&argmax(pred)),
    )))
}

pub fn clark(target: &[f64], pred: &[f64]) -> Result<f64> {
    same_dim(target, pred)?;
    let sum: f64 = target
        .iter()
        .zip(pred)
        .filter(|(d, p)| **d + **p > 0.0)
        .map(|(d, p)| ((d - p) / (d + p)).powi(2))
        .sum();
    Ok(sum.sqrt())
}

pub fn canberra(target: &[f64], pred: &[f64]) -> Result<f64> {
    same_dim(target, pred)?;
    Ok(target
        .iter()
        .zip(pred)
        .filter(|(d, p)| **d + **p > 0.0)
        .map(|(d, p)| (d - p).abs() / (d + p))
        .sum())
}

pub fn cosine(target: &[f64], pred: &[f64]) -> Result<f64> {
    same_dim(target, pred)?;
    let dot: f64 = target.iter().zip(pred).map(|(a, b)| a * b).sum();
    let na = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = pred.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InvalidArgument(
            "cosine similarity with a zero vector".into(),
        ));
    }
    Ok(dot / (na * nb))
}

pub fn intersection(target: &[f64], pred: &[f64]) -> Result<f64> {
    same_dim(target, pred)?;
    Ok(target.iter().zip(pred).map(|(a, b)| a.min(*b)).sum())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BinaryReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    /// Precision had a zero denominator and is reported as 0.
    pub precision_undefined: bool,
    /// Recall had a zero denominator and is reported as 0.
    pub recall_undefined: bool,
    /// Examples dropped because the target lonely block was tied.
    pub excluded_ties: usize,
}

/// Binary metrics with `true` = lonely as the positive class.
pub fn binary_metrics(pred: &[bool], truth: &[bool]) -> Result<BinaryReport> {
    if pred.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Empty("no labeled examples to score".into()));
    }
    let mut r = BinaryReport::default();
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => r.tp += 1,
            (true, false) => r.fp += 1,
            (false, false) => r.tn += 1,
            (false, true) => r.fn_ += 1,
        }
    }
    r.accuracy = (r.tp + r.tn) as f64 / pred.len() as f64;
    r.precision_undefined = r.tp + r.fp == 0;
    r.recall_undefined = r.tp + r.fn_ == 0;
    if !r.precision_undefined {
        r.precision = r.tp as f64 / (r.tp + r.fp) as f64;
    }
    if !r.recall_undefined {
        r.recall = r.tp as f64 / (r.tp + r.fn_) as f64;
    }
    if r.precision + r.recall > 0.0 {
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    }
    Ok(r)
}

/// Majority reading of a lonely block, or `None` on a tie.
pub fn binary_truth(lonely: &[f64]) -> Option<bool> {
    let set = argmax_set(lonely);
    (set.len() == 1).then(|| set[0] == 1)
}

/// Scores predicted lonely blocks against targets, dropping tied targets.
pub fn binary_from_blocks<'a, I>(pairs: I) -> Result<BinaryReport>
where
    I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
{
    let (mut pred, mut truth, mut ties) = (Vec::new(), Vec::new(), 0);
    for (p, t) in pairs {
        match binary_truth(t) {
            Some(label) => {
                pred.push(argmax(p) == 1);
                truth.push(label);
            }
            None => ties += 1,
        }
    }
    let mut report = binary_metrics(&pred, &truth)?;
    report.excluded_ties = ties;
    Ok(report)
}

pub const DIST_METRICS: [&str; 5] = ["accuracy", "clark", "canberra", "cosine", "intersection"];

/// Mean distribution metrics for one fine-grained category.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistReport {
    pub category: Category,
    pub k: usize,
    pub n: usize,
    pub accuracy: f64,
    pub clark: f64,
    pub canberra: f64,
    pub cosine: f64,
    pub intersection: f64,
}

impl DistReport {
    pub fn values(&self) -> [f64; 5] {
        [
            self.accuracy,
            self.clark,
            self.canberra,
            self.cosine,
            self.intersection,
        ]
    }
}

pub fn dist_report<'a, I>(category: Category, pairs: I) -> Result<DistReport>
where
    I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
{
    let mut sums = [0.0f64; 5];
    let mut n = 0usize;
    for (pred, target) in pairs {
        let row = [
            dist_accuracy(pred, target)?,
            clark(target, pred)?,
            canberra(target, pred)?,
            cosine(target, pred)?,
            intersection(target, pred)?,
        ];
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Empty(format!(
            "no lonely examples to score {category}"
        )));
    }
    let m = sums.map(|s| s / n as f64);
    Ok(DistReport {
        category,
        k: category.size(),
        n,
        accuracy: m[0],
        clark: m[1],
        canberra: m[2],
        cosine: m[3],
        intersection: m[4],
    })
}

/// Per-block predicted distributions for one post, in schema order.
pub type BlockDistributions = Vec<Vec<f64>>;

/// Metrics of one run (one seed) over a test set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub binary: BinaryReport,
    pub fine_grained: Vec<DistReport>,
}

/// Scores one run. Fine-grained metrics use only examples whose target
/// carries fine-grained mass.
pub fn evaluate_run(preds: &[BlockDistributions], targets: &[PostLabelSet]) -> Result<RunReport> {
    if preds.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if let Some(p) = preds.iter().find(|p| p.len() != Category::ALL.len()) {
        return Err(Error::Shape(format!("prediction has {} blocks", p.len())));
    }
    let binary = binary_from_blocks(
        preds
            .iter()
            .zip(targets)
            .map(|(p, t)| (p[0].as_slice(), t.lonely.values())),
    )?;
    let lonely: Vec<usize> = (0..targets.len())
        .filter(|&i| targets[i].has_fine_grained())
        .collect();
    if lonely.is_empty() {
        return Err(Error::Empty("test set has no lonely examples".into()));
    }
    let fine_grained = Category::FINE_GRAINED
        .iter()
        .map(|&c| {
            dist_report(
                c,
                lonely
                    .iter()
                    .map(|&i| (preds[i][c.index()].as_slice(), targets[i].block(c).values())),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport {
        binary,
        fine_grained,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub category: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

/// Mean and population standard deviation of each metric across runs.
pub fn summarize(runs: &[RunReport]) -> Result<Vec<EvalRow>> {
    if runs.is_empty() {
        return Err(Error::Empty("no runs to summarize".into()));
    }
    let row = |category: &str, metric: &str, values: Vec<f64>| {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        EvalRow {
            category: category.into(),
            metric: metric.into(),
            mean,
            std: var.sqrt(),
            runs: values.len(),
        }
    };
    let mut rows = Vec::new();
    type Getter = fn(&BinaryReport) -> f64;
    let binary: [(&str, Getter); 4] = [
        ("accuracy", |b| b.accuracy),
        ("precision", |b| b.precision),
        ("recall", |b| b.recall),
        ("f1", |b| b.f1),
    ];
    for (name, get) in binary {
        rows.push(row(
            "lonely",
            name,
            runs.iter().map(|r| get(&r.binary)).collect(),
        ));
    }
    for (ci, c) in Category::FINE_GRAINED.iter().enumerate() {
        for (mi, metric) in DIST_METRICS.iter().enumerate() {
            rows.push(row(
                c.name(),
                metric,
                runs.iter()
                    .map(|r| r.fine_grained[ci].values()[mi])
                    .collect(),
            ));
        }
    }
    Ok(rows)
}

pub fn write_eval_csv(path: &Path, rows: &[EvalRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["category", "metric", "mean", "std", "runs"])
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.category.clone(),
            r.metric.clone(),
            format!("{:.6}", r.mean),
            format!("{:.6}", r.std),
            r.runs.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_case() {
        let d = [1.0, 0.0];
        let p = [0.5, 0.5];
        assert_abs_diff_eq!(
            clark(&d, &p).unwrap(),
            (1.0f64 / 9.0 + 1.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(clark(&d, &p).unwrap(), 1.05409, epsilon = 1e-5);
        assert_abs_diff_eq!(canberra(&d, &p).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            cosine(&d, &p).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(intersection(&d, &p).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn identical_distributions() {
        let d = [0.2, 0.0, 0.5, 0.3];
        assert_eq!(clark(&d, &d).unwrap(), 0.0);
        assert_eq!(canberra(&d, &d).unwrap(), 0.0);
        assert_abs_diff_eq!(cosine(&d, &d).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(intersection(&d, &d).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn accuracy_uses_target_argmax_set() {
        assert_eq!(
            dist_accuracy(&[0.6, 0.2, 0.2], &[0.5, 0.5, 0.0]).unwrap(),
            1.0
        );
        assert_eq!(dist_accuracy(&[0.1, 0.9], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(
            dist_accuracy(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(),
            1.0
        );
        assert!(dist_accuracy(&[0.5, 0.5], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn metric_errors() {
        assert!(clark(&[1.0], &[0.5, 0.5]).is_err());
        assert!(cosine(&[0.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn binary_counts() {
        let r = binary_metrics(&[true, true, false], &[true, false, false]).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_, r.tn), (1, 1, 0, 1));
        assert_abs_diff_eq!(r.precision, 0.5);
        assert_abs_diff_eq!(r.recall, 1.0);
        assert_abs_diff_eq!(r.f1, 2.0 / 3.0, epsilon = 1e-15);

        let perfect = binary_metrics(&[true, false], &[true, false]).unwrap();
        assert_eq!(
            (
                perfect.accuracy,
                perfect.precision,
                perfect.recall,
                perfect.f1
            ),
            (1.0, 1.0, 1.0, 1.0)
        );

        let none = binary_metrics(&[false, false], &[false, false]).unwrap();
        assert!(none.precision_undefined && none.recall_undefined);
        assert_eq!(none.f1, 0.0);
        assert!(binary_metrics(&[true], &[]).is_err());
    }

    #[test]
    fn tied_targets_are_excluded() {
        let preds = [vec![0.2, 0.8], vec![0.9, 0.1]];
        let targets = [vec![0.5, 0.5], vec![1.0, 0.0]];
        let r = binary_from_blocks(
            preds
                .iter()
                .zip(&targets)
                .map(|(p, t)| (p.as_slice(), t.as_slice())),
        )
        .unwrap();
        assert_eq!(r.excluded_ties, 1);
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn perfect_single_example_and_identical_seeds() {
        let target = PostLabelSet::from_flat(&[
            0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
        ])
        .unwrap();
        let pred: BlockDistributions = target.blocks().map(|b| b.values().to_vec()).collect();
        let run = evaluate_run(&[pred], &[target]).unwrap();
        assert_eq!(run.binary.accuracy, 1.0);
        for d in &run.fine_grained {
            assert_eq!(d.accuracy, 1.0);
            assert_eq!(d.clark, 0.0);
        }
        let rows = summarize(&[run.clone(), run]).unwrap();
        assert!(rows.iter().all(|r| r.std == 0.0));
        assert_eq!(rows.len(), 4 + 4 * 5);
    }

    #[test]
    fn no_lonely_examples_is_an_error() {
        let target = PostLabelSet::nonlonely();
        let pred: BlockDistributions = Category::ALL
            .iter()
            .map(|c| vec![1.0 / c.size() as f64; c.size()])
            .collect();
        assert!(matches!(
            evaluate_run(&[pred], &[target]),
            Err(Error::Empty(_))
        ));
    }
}
