use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Link-prediction evaluation summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ap: f64,
    pub auc: f64,
    pub positives: usize,
    pub negatives: usize,
    /// "transductive" or "inductive".
    pub setting: String,
}

fn check_inputs(scores: &[f64], labels: &[f64]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!(
            "scores ({}) and labels ({}) differ in length",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores must not be NaN"));
    }
    if labels.iter().any(|&l| l != 0.0 && l != 1.0) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    Ok(())
}

/// Area under the precision-recall step curve: ranks descending by score
/// (ties broken by input index) and sums `(R_k - R_{k-1}) * P_k` at each
/// positive.
pub fn average_precision(scores: &[f64], labels: &[f64]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let total_pos = labels.iter().filter(|&&l| l == 1.0).count();
    if total_pos == 0 {
        return Err(Error::invalid("average precision needs at least one positive"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b].partial_cmp(&scores[a]).expect("finite scores").then(a.cmp(&b))
    });
    let mut tp = 0usize;
    let mut ap = 0.0;
    for (rank, &idx) in order.iter().enumerate() {
        if labels[idx] == 1.0 {
            tp += 1;
            let precision = tp as f64 / (rank + 1) as f64;
            ap += precision / total_pos as f64;
        }
    }
    Ok(ap)
}

/// Probability that a random positive outranks a random negative, ties
/// counted half (rank-sum formulation).
pub fn roc_auc(scores: &[f64], labels: &[f64]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1.0).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid("auc needs both classes present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    // Average ranks across tied scores.
    let mut ranks = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0; // 1-based ranks
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    let pos_rank_sum: f64 =
        ranks.iter().zip(labels).filter(|(_, &l)| l == 1.0).map(|(r, _)| r).sum();
    let p = pos as f64;
    let n = neg as f64;
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}
