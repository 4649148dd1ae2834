use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::model::{bce_loss, forward_cached, loss_and_grad, Example};
use super::params::ModelParams;

/// Per-block comparison of analytic gradients against central finite
/// differences.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradReport {
    pub epsilon: f64,
    pub blocks: Vec<BlockError>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockError {
    pub name: String,
    pub max_rel_err: f64,
}

impl GradReport {
    pub fn max_rel_err(&self) -> f64 {
        self.blocks.iter().map(|b| b.max_rel_err).fold(0.0, f64::max)
    }

    pub fn block(&self, name: &str) -> Option<&BlockError> {
        self.blocks.iter().find(|b| b.name == name)
    }
}

/// Perturbs every scalar parameter by ±epsilon, recomputes the loss and
/// compares `(L(θ+ε) - L(θ-ε)) / 2ε` against the analytic gradient. The
/// relative error denominator is `max(|analytic|, |numeric|, 1e-8)`.
pub fn finite_diff_check(
    params: &ModelParams,
    example: &Example,
    epsilon: f64,
) -> Result<GradReport> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside [1e-7, 1e-3]")));
    }
    let (_, grads) = loss_and_grad(params, std::slice::from_ref(example))?;
    let analytic = grads.to_flat();
    let layout = params.block_layout();

    let mut flat = params.to_flat();
    let mut scratch = params.clone();
    let mut loss_at = |flat: &[f64]| -> Result<f64> {
        scratch.assign_from_flat(flat)?;
        let cache = forward_cached(&scratch, &example.bundle, None)?;
        Ok(bce_loss(cache.prob, example.label))
    };

    let mut blocks = Vec::with_capacity(layout.len());
    let mut at = 0;
    for (name, len) in layout {
        let mut max_rel = 0.0f64;
        for i in at..at + len {
            let original = flat[i];
            flat[i] = original + epsilon;
            let plus = loss_at(&flat)?;
            flat[i] = original - epsilon;
            let minus = loss_at(&flat)?;
            flat[i] = original;
            let numeric = (plus - minus) / (2.0 * epsilon);
            let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
            max_rel = max_rel.max((analytic[i] - numeric).abs() / denom);
        }
        at += len;
        blocks.push(BlockError { name, max_rel_err: max_rel });
    }
    Ok(GradReport { epsilon, blocks })
}
