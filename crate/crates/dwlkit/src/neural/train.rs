use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encode::{build_encoding_bundle, TimeEncoding};
use crate::error::{Error, Result};
use crate::harness::{
    average_precision, roc_auc, training_graph, MetricsReport, Section, SplitSpec,
};
use crate::temporal::{build_dat, Dat, DynamicGraph};

use super::model::{loss_and_grad, predict, Example};
use super::params::{ModelDims, ModelParams};

/// Training-run configuration. Defaults follow the usual link-prediction
/// protocol for this model family: Adam at 1e-4, batches of 200, 50 epochs
/// with patience 10, K=32 preserved timestamps, 50-wide MITE projection,
/// 100-wide time encoding, two 2-head layers at aligned width 50.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub neighbor_limit: usize,
    pub patch: usize,
    pub mite_k: usize,
    pub mite_dim: usize,
    pub time_dim: usize,
    pub aligned_dim: usize,
    pub layers: usize,
    pub heads: usize,
    pub ff_dim: usize,
    pub out_dim: usize,
    /// Ablation switch: zero the raw MITE rows of every bundle.
    pub zero_mite: bool,
    /// Dataset path consumed by the CLI; unused by the library calls.
    pub data: Option<String>,
    /// Dataset format name consumed by the CLI.
    pub format: Option<String>,
    /// Inductive masking fraction applied by the CLI (0 = transductive).
    pub inductive_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-4,
            batch_size: 200,
            epochs: 50,
            patience: 10,
            seed: 0,
            neighbor_limit: 32,
            patch: 1,
            mite_k: 32,
            mite_dim: 50,
            time_dim: 100,
            aligned_dim: 50,
            layers: 2,
            heads: 2,
            ff_dim: 400,
            out_dim: 50,
            zero_mite: false,
            data: None,
            format: None,
            inductive_fraction: 0.0,
        }
    }
}

impl TrainConfig {
    /// Parses `key=value` lines; `#` starts a comment, blank lines ignored.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: format!("expected key=value, got '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parse_err = |what: &str| Error::Parse {
                line: lineno + 1,
                msg: format!("invalid {what} '{value}'"),
            };
            match key {
                "learning_rate" | "lr" => {
                    cfg.learning_rate = value.parse().map_err(|_| parse_err("learning rate"))?
                }
                "batch_size" => cfg.batch_size = value.parse().map_err(|_| parse_err("batch size"))?,
                "epochs" => cfg.epochs = value.parse().map_err(|_| parse_err("epochs"))?,
                "patience" => cfg.patience = value.parse().map_err(|_| parse_err("patience"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| parse_err("seed"))?,
                "neighbor_limit" => {
                    cfg.neighbor_limit = value.parse().map_err(|_| parse_err("neighbor limit"))?
                }
                "patch" => cfg.patch = value.parse().map_err(|_| parse_err("patch size"))?,
                "mite_k" => cfg.mite_k = value.parse().map_err(|_| parse_err("mite_k"))?,
                "mite_dim" => cfg.mite_dim = value.parse().map_err(|_| parse_err("mite_dim"))?,
                "time_dim" => cfg.time_dim = value.parse().map_err(|_| parse_err("time_dim"))?,
                "aligned_dim" => {
                    cfg.aligned_dim = value.parse().map_err(|_| parse_err("aligned_dim"))?
                }
                "layers" => cfg.layers = value.parse().map_err(|_| parse_err("layers"))?,
                "heads" => cfg.heads = value.parse().map_err(|_| parse_err("heads"))?,
                "ff_dim" => cfg.ff_dim = value.parse().map_err(|_| parse_err("ff_dim"))?,
                "out_dim" => cfg.out_dim = value.parse().map_err(|_| parse_err("out_dim"))?,
                "zero_mite" => cfg.zero_mite = value.parse().map_err(|_| parse_err("zero_mite"))?,
                "data" => cfg.data = Some(value.to_string()),
                "format" => cfg.format = Some(value.to_string()),
                "inductive_fraction" => {
                    cfg.inductive_fraction =
                        value.parse().map_err(|_| parse_err("inductive fraction"))?
                }
                other => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("unknown configuration key '{other}'"),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if self.batch_size == 0 || self.neighbor_limit == 0 {
            return Err(Error::invalid("batch_size and neighbor_limit must be positive"));
        }
        if !(0.0..=1.0).contains(&self.inductive_fraction) {
            return Err(Error::invalid("inductive_fraction must lie in [0, 1]"));
        }
        self.dims_for(0, 0).validate()
    }

    pub fn dims_for(&self, node_dim: usize, edge_dim: usize) -> ModelDims {
        ModelDims {
            node_dim,
            edge_dim,
            time_dim: self.time_dim,
            mite_k: self.mite_k,
            mite_dim: self.mite_dim,
            aligned_dim: self.aligned_dim,
            layers: self.layers,
            heads: self.heads,
            ff_dim: self.ff_dim,
            out_dim: self.out_dim,
            patch: self.patch,
        }
    }

    pub fn time_encoding(&self) -> Result<TimeEncoding> {
        TimeEncoding::geometric(self.time_dim)
    }
}

/// Per-epoch training record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_ap: f64,
    pub val_auc: f64,
}

/// Builds one supervised example for a candidate pair at time `t`.
pub fn build_example(
    g: &DynamicGraph,
    dat: &Dat,
    pair: (usize, usize),
    t: f64,
    label: f64,
    config: &TrainConfig,
    enc: &TimeEncoding,
) -> Result<Example> {
    let mut bundle =
        build_encoding_bundle(g, dat, pair, t, config.neighbor_limit, config.mite_k, enc)?;
    if config.zero_mite {
        bundle.x_m.data_mut().fill(0.0);
    }
    Ok(Example { bundle, label })
}

fn sample_negative(rng: &mut ChaCha8Rng, node_count: usize, src: usize) -> usize {
    loop {
        let v = rng.random_range(0..node_count);
        if v != src {
            return v;
        }
    }
}

/// Adam with bias correction; moments live in flat parameter space.
struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

impl Adam {
    fn new(lr: f64, len: usize) -> Self {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Trains on the split's training interactions in chronological batches,
/// pairing each positive with one sampled negative (same source, random
/// other destination). Keeps the parameters with the best validation AP and
/// stops early after `patience` epochs without improvement.
///
/// Training neighborhoods come from the training graph (masked events
/// removed under an inductive split); validation scoring uses the full
/// history, matching how the model is deployed after the cut-off.
pub fn train(
    g: &DynamicGraph,
    dat: &Dat,
    split: &SplitSpec,
    config: &TrainConfig,
) -> Result<(ModelParams, Vec<EpochStats>)> {
    config.validate()?;
    if g.node_count() < 2 {
        return Err(Error::invalid("training needs at least two nodes"));
    }
    let enc = config.time_encoding()?;
    let tg = training_graph(g, split)?;
    let tg_dat = build_dat(&tg);
    let dims = config.dims_for(g.node_features().cols(), g.edge_features().cols());
    let mut params = ModelParams::init(dims, config.seed)?;
    let mut history = Vec::new();
    if config.epochs == 0 {
        return Ok((params, history));
    }

    let train_events = split.train_event_indices();
    let mut adam = Adam::new(config.learning_rate, params.flat_len());
    let mut best: Option<(f64, ModelParams)> = None;
    let mut stale_epochs = 0usize;
    let mut neg_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);

    for epoch in 1..=config.epochs {
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for (batch_no, chunk) in train_events.chunks(config.batch_size).enumerate() {
            let mut batch = Vec::with_capacity(chunk.len() * 2);
            for &idx in chunk {
                let ev = &tg.events()[idx];
                batch.push(build_example(&tg, &tg_dat, (ev.src, ev.dst), ev.time, 1.0, config, &enc)?);
                let neg = sample_negative(&mut neg_rng, g.node_count(), ev.src);
                batch.push(build_example(&tg, &tg_dat, (ev.src, neg), ev.time, 0.0, config, &enc)?);
            }
            let (loss, grads) = match loss_and_grad(&params, &batch) {
                Ok(result) => result,
                // A non-finite activation means the weights blew up; report
                // it with the training position.
                Err(Error::NonFinite(_)) => {
                    return Err(Error::Diverged { epoch, batch: batch_no, loss: f64::NAN })
                }
                Err(other) => return Err(other),
            };
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, batch: batch_no, loss });
            }
            let mut flat = params.to_flat();
            adam.step(&mut flat, &grads.to_flat());
            params.assign_from_flat(&flat)?;
            epoch_loss += loss;
            batches += 1;
        }
        let val = evaluate(&params, g, dat, split, Section::Val, config)?;
        history.push(EpochStats {
            epoch,
            train_loss: epoch_loss / batches.max(1) as f64,
            val_ap: val.ap,
            val_auc: val.auc,
        });
        let improved = best.as_ref().map_or(true, |(ap, _)| val.ap > *ap);
        if improved {
            best = Some((val.ap, params.clone()));
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs >= config.patience {
                break;
            }
        }
    }
    let final_params = best.map(|(_, p)| p).unwrap_or(params);
    Ok((final_params, history))
}

/// Scores every positive of the section plus one sampled negative per
/// positive (fixed per split seed) and reports AP/AUC. Neighborhoods draw on
/// the full event history before each query time.
pub fn evaluate(
    params: &ModelParams,
    g: &DynamicGraph,
    dat: &Dat,
    split: &SplitSpec,
    section: Section,
    config: &TrainConfig,
) -> Result<MetricsReport> {
    let positives = split.section_event_indices(g, section);
    if positives.is_empty() {
        return Err(Error::invalid(format!("empty {section:?} section")));
    }
    let enc = config.time_encoding()?;
    let section_tag: u64 = match section {
        Section::Val => 0x56414c,
        Section::Test => 0x54455354,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(split.seed ^ section_tag);
    let mut scores = Vec::with_capacity(positives.len() * 2);
    let mut labels = Vec::with_capacity(positives.len() * 2);
    for &idx in &positives {
        let ev = &g.events()[idx];
        let pos = build_example(g, dat, (ev.src, ev.dst), ev.time, 1.0, config, &enc)?;
        scores.push(predict(params, &pos.bundle)?);
        labels.push(1.0);
        let neg_dst = sample_negative(&mut rng, g.node_count(), ev.src);
        let neg = build_example(g, dat, (ev.src, neg_dst), ev.time, 0.0, config, &enc)?;
        scores.push(predict(params, &neg.bundle)?);
        labels.push(0.0);
    }
    Ok(MetricsReport {
        ap: average_precision(&scores, &labels)?,
        auc: roc_auc(&scores, &labels)?,
        positives: positives.len(),
        negatives: positives.len(),
        setting: if split.is_inductive() { "inductive" } else { "transductive" }.to_string(),
    })
}
