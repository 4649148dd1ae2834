use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encode::Alignment;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Shape configuration of the pair-level sequence model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    /// Node feature width of the data (the combined encoding is 3x this).
    pub node_dim: usize,
    /// Edge feature width of the data.
    pub edge_dim: usize,
    /// Time encoding width (even).
    pub time_dim: usize,
    /// Preserved timestamps per MITE half.
    pub mite_k: usize,
    /// Width of the projected MITE.
    pub mite_dim: usize,
    /// Common width each encoding is aligned to; the model width is 4x this.
    pub aligned_dim: usize,
    pub layers: usize,
    pub heads: usize,
    /// Hidden width of the feed-forward blocks.
    pub ff_dim: usize,
    /// Width of the pair embedding.
    pub out_dim: usize,
    /// Patch size.
    pub patch: usize,
}

impl ModelDims {
    /// Model width after concatenating the four aligned encodings.
    pub fn width(&self) -> usize {
        4 * self.aligned_dim
    }

    pub fn head_dim(&self) -> usize {
        self.width() / self.heads
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_dim == 0 || self.time_dim % 2 != 0 {
            return Err(Error::invalid("time_dim must be even and positive"));
        }
        if self.mite_k == 0 || self.mite_dim == 0 || self.aligned_dim == 0 {
            return Err(Error::invalid("mite_k, mite_dim and aligned_dim must be positive"));
        }
        if self.heads == 0 || self.width() % self.heads != 0 {
            return Err(Error::invalid(format!(
                "model width {} must be divisible by {} heads",
                self.width(),
                self.heads
            )));
        }
        if self.layers == 0 || self.ff_dim == 0 || self.out_dim == 0 || self.patch == 0 {
            return Err(Error::invalid("layers, ff_dim, out_dim and patch must be positive"));
        }
        Ok(())
    }
}

/// One pre-norm residual block: self-attention then feed-forward.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams {
    pub w_q: Matrix,
    pub b_q: Vec<f64>,
    /// Key projection carries no bias: a shared key offset shifts every
    /// attention score in a row equally, which the softmax cancels exactly.
    pub w_k: Matrix,
    pub w_v: Matrix,
    pub b_v: Vec<f64>,
    pub w_o: Matrix,
    pub b_o: Vec<f64>,
    pub ln1_gain: Vec<f64>,
    pub ln1_bias: Vec<f64>,
    pub ln2_gain: Vec<f64>,
    pub ln2_bias: Vec<f64>,
    pub w_ff1: Matrix,
    pub b_ff1: Vec<f64>,
    pub w_ff2: Matrix,
    pub b_ff2: Vec<f64>,
}

/// Every learnable weight of the model. The same structure doubles as the
/// gradient container (see [`ModelParams::zeros_like`]).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub dims: ModelDims,
    /// Two-layer projection of raw MITE rows, 2K -> d_B -> d_B.
    pub mite_w1: Matrix,
    pub mite_b1: Vec<f64>,
    pub mite_w2: Matrix,
    pub mite_b2: Vec<f64>,
    /// Patch alignment weights for the four encodings.
    pub align: Alignment,
    pub layers: Vec<LayerParams>,
    /// Pooled representation to pair embedding, 4d -> d_out.
    pub w_out: Matrix,
    pub b_out: Vec<f64>,
    /// Affine scorer on the pair embedding.
    pub w_score: Vec<f64>,
    pub b_score: f64,
}

fn glorot(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let bound = (6.0 / (rows + cols).max(1) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..=bound))
}

impl ModelParams {
    /// Glorot-uniform weights, zero biases, unit layer-norm gains.
    pub fn init(dims: ModelDims, seed: u64) -> Result<Self> {
        dims.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = dims.aligned_dim;
        let width = dims.width();
        let align = Alignment {
            w_c: glorot(&mut rng, dims.patch * 3 * dims.node_dim, d),
            b_c: vec![0.0; d],
            w_e: glorot(&mut rng, dims.patch * dims.edge_dim, d),
            b_e: vec![0.0; d],
            w_t: glorot(&mut rng, dims.patch * dims.time_dim, d),
            b_t: vec![0.0; d],
            w_m: glorot(&mut rng, dims.patch * dims.mite_dim, d),
            b_m: vec![0.0; d],
        };
        let layers = (0..dims.layers)
            .map(|_| LayerParams {
                w_q: glorot(&mut rng, width, width),
                b_q: vec![0.0; width],
                w_k: glorot(&mut rng, width, width),
                w_v: glorot(&mut rng, width, width),
                b_v: vec![0.0; width],
                w_o: glorot(&mut rng, width, width),
                b_o: vec![0.0; width],
                ln1_gain: vec![1.0; width],
                ln1_bias: vec![0.0; width],
                ln2_gain: vec![1.0; width],
                ln2_bias: vec![0.0; width],
                w_ff1: glorot(&mut rng, width, dims.ff_dim),
                b_ff1: vec![0.0; dims.ff_dim],
                w_ff2: glorot(&mut rng, dims.ff_dim, width),
                b_ff2: vec![0.0; width],
            })
            .collect();
        Ok(ModelParams {
            mite_w1: glorot(&mut rng, 2 * dims.mite_k, dims.mite_dim),
            mite_b1: vec![0.0; dims.mite_dim],
            mite_w2: glorot(&mut rng, dims.mite_dim, dims.mite_dim),
            mite_b2: vec![0.0; dims.mite_dim],
            align,
            layers,
            w_out: glorot(&mut rng, width, dims.out_dim),
            b_out: vec![0.0; dims.out_dim],
            w_score: (0..dims.out_dim)
                .map(|_| {
                    let bound = (6.0 / (dims.out_dim + 1) as f64).sqrt();
                    rng.random_range(-bound..=bound)
                })
                .collect(),
            b_score: 0.0,
            dims,
        })
    }

    /// Same shapes, every value zero. Used as the gradient accumulator and
    /// for optimizer moments.
    pub fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        out.for_each_block_mut(|_, block| block.fill(0.0));
        out
    }

    /// Visits every named parameter block in the fixed flattening order.
    pub fn for_each_block<'a>(&'a self, mut f: impl FnMut(&str, &'a [f64])) {
        f("mite.w1", self.mite_w1.data());
        f("mite.b1", &self.mite_b1);
        f("mite.w2", self.mite_w2.data());
        f("mite.b2", &self.mite_b2);
        f("align.w_c", self.align.w_c.data());
        f("align.b_c", &self.align.b_c);
        f("align.w_e", self.align.w_e.data());
        f("align.b_e", &self.align.b_e);
        f("align.w_t", self.align.w_t.data());
        f("align.b_t", &self.align.b_t);
        f("align.w_m", self.align.w_m.data());
        f("align.b_m", &self.align.b_m);
        for (i, layer) in self.layers.iter().enumerate() {
            let name = |part: &str| format!("layers.{i}.{part}");
            f(&name("w_q"), layer.w_q.data());
            f(&name("b_q"), &layer.b_q);
            f(&name("w_k"), layer.w_k.data());
            f(&name("w_v"), layer.w_v.data());
            f(&name("b_v"), &layer.b_v);
            f(&name("w_o"), layer.w_o.data());
            f(&name("b_o"), &layer.b_o);
            f(&name("ln1_gain"), &layer.ln1_gain);
            f(&name("ln1_bias"), &layer.ln1_bias);
            f(&name("ln2_gain"), &layer.ln2_gain);
            f(&name("ln2_bias"), &layer.ln2_bias);
            f(&name("w_ff1"), layer.w_ff1.data());
            f(&name("b_ff1"), &layer.b_ff1);
            f(&name("w_ff2"), layer.w_ff2.data());
            f(&name("b_ff2"), &layer.b_ff2);
        }
        f("out.w", self.w_out.data());
        f("out.b", &self.b_out);
        f("score.w", &self.w_score);
        f("score.b", std::slice::from_ref(&self.b_score));
    }

    /// Mutable visit, same order as [`Self::for_each_block`].
    pub fn for_each_block_mut(&mut self, mut f: impl FnMut(&str, &mut [f64])) {
        f("mite.w1", self.mite_w1.data_mut());
        f("mite.b1", &mut self.mite_b1);
        f("mite.w2", self.mite_w2.data_mut());
        f("mite.b2", &mut self.mite_b2);
        f("align.w_c", self.align.w_c.data_mut());
        f("align.b_c", &mut self.align.b_c);
        f("align.w_e", self.align.w_e.data_mut());
        f("align.b_e", &mut self.align.b_e);
        f("align.w_t", self.align.w_t.data_mut());
        f("align.b_t", &mut self.align.b_t);
        f("align.w_m", self.align.w_m.data_mut());
        f("align.b_m", &mut self.align.b_m);
        for (i, layer) in self.layers.iter_mut().enumerate() {
            let name = |part: &str| format!("layers.{i}.{part}");
            f(&name("w_q"), layer.w_q.data_mut());
            f(&name("b_q"), &mut layer.b_q);
            f(&name("w_k"), layer.w_k.data_mut());
            f(&name("w_v"), layer.w_v.data_mut());
            f(&name("b_v"), &mut layer.b_v);
            f(&name("w_o"), layer.w_o.data_mut());
            f(&name("b_o"), &mut layer.b_o);
            f(&name("ln1_gain"), &mut layer.ln1_gain);
            f(&name("ln1_bias"), &mut layer.ln1_bias);
            f(&name("ln2_gain"), &mut layer.ln2_gain);
            f(&name("ln2_bias"), &mut layer.ln2_bias);
            f(&name("w_ff1"), layer.w_ff1.data_mut());
            f(&name("b_ff1"), &mut layer.b_ff1);
            f(&name("w_ff2"), layer.w_ff2.data_mut());
            f(&name("b_ff2"), &mut layer.b_ff2);
        }
        f("out.w", self.w_out.data_mut());
        f("out.b", &mut self.b_out);
        f("score.w", &mut self.w_score);
        f("score.b", std::slice::from_mut(&mut self.b_score));
    }

    /// Block names and lengths in flattening order.
    pub fn block_layout(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.for_each_block(|name, block| out.push((name.to_string(), block.len())));
        out
    }

    /// All parameters as one flat vector (flattening order).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.for_each_block(|_, block| out.extend_from_slice(block));
        out
    }

    pub fn flat_len(&self) -> usize {
        let mut n = 0;
        self.for_each_block(|_, block| n += block.len());
        n
    }

    /// Writes a flat vector back into the parameter structure.
    pub fn assign_from_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.flat_len() {
            return Err(Error::invalid(format!(
                "flat parameter length {} != expected {}",
                flat.len(),
                self.flat_len()
            )));
        }
        let mut at = 0;
        self.for_each_block_mut(|_, block| {
            block.copy_from_slice(&flat[at..at + block.len()]);
            at += block.len();
        });
        Ok(())
    }

    /// `self += scale * other`, blockwise.
    pub fn add_scaled(&mut self, other: &ModelParams, scale: f64) {
        let flat = other.to_flat();
        let mut at = 0;
        self.for_each_block_mut(|_, block| {
            for v in block.iter_mut() {
                *v += scale * flat[at];
                at += 1;
            }
        });
    }

    pub fn scale(&mut self, s: f64) {
        self.for_each_block_mut(|_, block| {
            for v in block.iter_mut() {
                *v *= s;
            }
        });
    }
}

/// Manifest stored next to the flat binary weights.
#[derive(Serialize, Deserialize)]
pub(crate) struct ParamsManifest {
    pub dims: ModelDims,
    pub blocks: Vec<(String, usize)>,
    pub data_file: String,
    /// Optional training configuration echo for `eval` convenience.
    pub config: Option<crate::neural::TrainConfig>,
}

/// Saves parameters as `<stem>.json` (shape manifest) plus `<stem>.bin`
/// (flat little-endian f64 blocks in manifest order).
pub fn save_params(
    params: &ModelParams,
    stem: &std::path::Path,
    config: Option<&crate::neural::TrainConfig>,
) -> Result<()> {
    let bin_name = format!(
        "{}.bin",
        stem.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    );
    let manifest = ParamsManifest {
        dims: params.dims.clone(),
        blocks: params.block_layout(),
        data_file: bin_name.clone(),
        config: config.cloned(),
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(stem.with_extension("json"), json)?;
    let flat = params.to_flat();
    let mut bytes = Vec::with_capacity(flat.len() * 8);
    for v in flat {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(stem.with_extension("bin"), bytes)?;
    Ok(())
}

/// Loads parameters saved by [`save_params`]; `stem` may also point at the
/// manifest file itself.
pub fn load_params(
    stem: &std::path::Path,
) -> Result<(ModelParams, Option<crate::neural::TrainConfig>)> {
    let manifest_path = if stem.extension().is_some_and(|e| e == "json") {
        stem.to_path_buf()
    } else {
        stem.with_extension("json")
    };
    let manifest: ParamsManifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)?;
    let bin_path = manifest_path.with_file_name(&manifest.data_file);
    let bytes = std::fs::read(&bin_path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::invalid("weight file length is not a multiple of 8"));
    }
    let flat: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let mut params = ModelParams::init(manifest.dims.clone(), 0)?;
    let expected = params.block_layout();
    if expected != manifest.blocks {
        return Err(Error::invalid("weight manifest does not match the model layout"));
    }
    params.assign_from_flat(&flat)?;
    Ok((params, manifest.config))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny_dims() -> ModelDims {
        ModelDims {
            node_dim: 1,
            edge_dim: 0,
            time_dim: 4,
            mite_k: 2,
            mite_dim: 3,
            aligned_dim: 2,
            layers: 1,
            heads: 2,
            ff_dim: 5,
            out_dim: 3,
            patch: 2,
        }
    }

    #[test]
    fn flat_roundtrip_preserves_everything() {
        let p = ModelParams::init(tiny_dims(), 9).unwrap();
        let flat = p.to_flat();
        let mut q = ModelParams::init(tiny_dims(), 1234).unwrap();
        q.assign_from_flat(&flat).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn layout_covers_all_parameters() {
        let p = ModelParams::init(tiny_dims(), 9).unwrap();
        let total: usize = p.block_layout().iter().map(|(_, len)| len).sum();
        assert_eq!(total, p.flat_len());
        assert_eq!(p.to_flat().len(), total);
    }

    #[test]
    fn save_load_bitwise_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = ModelParams::init(tiny_dims(), 42).unwrap();
        let stem = dir.path().join("weights");
        save_params(&p, &stem, None).unwrap();
        let (q, cfg) = load_params(&stem).unwrap();
        assert_eq!(p, q);
        assert!(cfg.is_none());
    }

    #[test]
    fn head_split_must_divide_width() {
        let mut dims = tiny_dims();
        dims.heads = 3;
        assert!(ModelParams::init(dims, 0).is_err());
    }
}
