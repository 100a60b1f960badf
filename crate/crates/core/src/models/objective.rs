//! The hierarchical distributional objective, the HDLN joint loss, and the
//! local/global blend.

use crate::error::{Error, Result};
use crate::metrics::BlockDistributions;
use crate::nn::{softmax_xent, Real};
use crate::schema::{Category, PostLabelSet};

/// Weight of each block in the objective: the lonely block counts once and the
/// four fine-grained blocks share equal weight `1/|C|`.
pub const BLOCK_WEIGHTS: [f64; 5] = [1.0, 0.25, 0.25, 0.25, 0.25];

/// Cross-entropy `−Σ p_k ln q_k`, skipping zero-mass target entries.
pub fn cross_entropy(target: &[f64], pred: &[f64]) -> Result<f64> {
    if target.len() != pred.len() {
        return Err(Error::Shape(format!(
            "target dim {} vs prediction dim {}",
            target.len(),
            pred.len()
        )));
    }
    Ok(target
        .iter()
        .zip(pred)
        .filter(|(p, _)| **p != 0.0)
        .map(|(p, q)| -p * q.ln())
        .sum())
}

fn check_blocks(pred: &BlockDistributions) -> Result<()> {
    if pred.len() != Category::ALL.len() {
        return Err(Error::Shape(format!(
            "prediction has {} blocks, expected 5",
            pred.len()
        )));
    }
    for (block, c) in pred.iter().zip(Category::ALL) {
        if block.len() != c.size() {
            return Err(Error::Shape(format!(
                "{c} prediction has {} entries, expected {}",
                block.len(),
                c.size()
            )));
        }
    }
    Ok(())
}

/// Per-example objective terms: the lonely loss and the averaged fine-grained loss.
pub fn objective_terms(target: &PostLabelSet, pred: &BlockDistributions) -> Result<(f64, f64)> {
    check_blocks(pred)?;
    let lonely = cross_entropy(target.lonely.values(), &pred[0])?;
    let mut fine = 0.0;
    for c in Category::FINE_GRAINED {
        fine += cross_entropy(target.block(c).values(), &pred[c.index()])?;
    }
    Ok((lonely, fine / Category::FINE_GRAINED.len() as f64))
}

/// Mean over posts of `ℓ(lonely) + (1/4) Σ_c ℓ(c)` with cross-entropy `ℓ`.
pub fn hdl_objective(targets: &[PostLabelSet], preds: &[BlockDistributions]) -> Result<f64> {
    if targets.len() != preds.len() {
        return Err(Error::Shape(format!(
            "{} targets for {} predictions",
            targets.len(),
            preds.len()
        )));
    }
    if targets.is_empty() {
        return Err(Error::Empty("objective over an empty batch".into()));
    }
    let mut total = 0.0;
    for (t, p) in targets.iter().zip(preds) {
        let (lonely, fine) = objective_terms(t, p)?;
        total += lonely + fine;
    }
    Ok(total / targets.len() as f64)
}

/// Local, global, and blended block distributions for one post.
#[derive(Clone, Debug, PartialEq)]
pub struct HdlnPrediction {
    pub local: BlockDistributions,
    pub global: BlockDistributions,
    pub blended: BlockDistributions,
    pub beta: f64,
}

impl HdlnPrediction {
    pub fn new(local: BlockDistributions, global: BlockDistributions, beta: f64) -> Result<Self> {
        let blended = blend(&local, &global, beta)?;
        Ok(Self {
            local,
            global,
            blended,
            beta,
        })
    }
}

/// Joint HDLN loss: half the objective on local outputs plus half on global outputs.
pub fn hdln_loss(targets: &[PostLabelSet], preds: &[HdlnPrediction]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::Empty("HDLN loss over an empty batch".into()));
    }
    let local: Vec<BlockDistributions> = preds.iter().map(|p| p.local.clone()).collect();
    let global: Vec<BlockDistributions> = preds.iter().map(|p| p.global.clone()).collect();
    Ok(0.5 * hdl_objective(targets, &local)? + 0.5 * hdl_objective(targets, &global)?)
}

/// Blockwise `β·local + (1−β)·global`.
pub fn blend(
    local: &BlockDistributions,
    global: &BlockDistributions,
    beta: f64,
) -> Result<BlockDistributions> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!(
            "beta {beta} outside [0, 1]"
        )));
    }
    check_blocks(local)?;
    check_blocks(global)?;
    Ok(local
        .iter()
        .zip(global)
        .map(|(l, g)| {
            l.iter()
                .zip(g)
                .map(|(a, b)| beta * a + (1.0 - beta) * b)
                .collect()
        })
        .collect())
}

/// Objective contribution and logit gradient for one example whose five block
/// logits are concatenated in `logits`. `scale` multiplies both.
pub(crate) fn objective_from_logits<T: Real>(
    logits: &[T],
    target: &[f64],
    scale: f64,
) -> Result<(f64, Vec<f64>)> {
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(logits.len());
    let mut off = 0;
    for (c, w) in Category::ALL.iter().zip(BLOCK_WEIGHTS) {
        let k = c.size();
        let (l, g) = softmax_xent(&logits[off..off + k], &target[off..off + k])?;
        loss += scale * w * l;
        grad.extend(g.into_iter().map(|v| scale * w * v));
        off += k;
    }
    Ok((loss, grad))
}
