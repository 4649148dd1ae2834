use crate::encode::{patch_rows, EncodingBundle};
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

use super::params::ModelParams;

const LN_EPS: f64 = 1e-5;

/// One supervised example: the encoded joint neighborhood of a candidate
/// pair and its 0/1 label.
#[derive(Clone, Debug)]
pub struct Example {
    pub bundle: EncodingBundle,
    pub label: f64,
}

/// Gaussian-error activation (tanh form); smooth everywhere, which keeps
/// finite-difference checks clean.
fn gelu(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
    const A: f64 = 0.044_715;
    0.5 * x * (1.0 + (C * (x + A * x * x * x)).tanh())
}

fn gelu_grad(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4;
    const A: f64 = 0.044_715;
    let u = C * (x + A * x * x * x);
    let t = u.tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * C * (1.0 + 3.0 * A * x * x)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

struct LnCache {
    xhat: Matrix,
    inv_std: Vec<f64>,
}

/// Row-wise layer norm: y = gain ⊙ (x - mean)/sqrt(var + eps) + bias.
fn layer_norm(x: &Matrix, gain: &[f64], bias: &[f64]) -> (Matrix, LnCache) {
    let cols = x.cols();
    let mut y = Matrix::zeros(x.rows(), cols);
    let mut xhat = Matrix::zeros(x.rows(), cols);
    let mut inv_std = Vec::with_capacity(x.rows());
    for r in 0..x.rows() {
        let row = x.row(r);
        let mean = row.iter().sum::<f64>() / cols as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / cols as f64;
        let inv = 1.0 / (var + LN_EPS).sqrt();
        inv_std.push(inv);
        for c in 0..cols {
            let h = (row[c] - mean) * inv;
            xhat.set(r, c, h);
            y.set(r, c, gain[c] * h + bias[c]);
        }
    }
    (y, LnCache { xhat, inv_std })
}

/// Backward of [`layer_norm`]: accumulates gain/bias grads, returns dx.
fn layer_norm_backward(
    dy: &Matrix,
    cache: &LnCache,
    gain: &[f64],
    d_gain: &mut [f64],
    d_bias: &mut [f64],
) -> Matrix {
    let cols = dy.cols();
    let mut dx = Matrix::zeros(dy.rows(), cols);
    for r in 0..dy.rows() {
        let dy_row = dy.row(r);
        let xhat_row = cache.xhat.row(r);
        let mut mean_dxhat = 0.0;
        let mut mean_dxhat_xhat = 0.0;
        for c in 0..cols {
            d_gain[c] += dy_row[c] * xhat_row[c];
            d_bias[c] += dy_row[c];
            let dxhat = dy_row[c] * gain[c];
            mean_dxhat += dxhat;
            mean_dxhat_xhat += dxhat * xhat_row[c];
        }
        mean_dxhat /= cols as f64;
        mean_dxhat_xhat /= cols as f64;
        let inv = cache.inv_std[r];
        for c in 0..cols {
            let dxhat = dy_row[c] * gain[c];
            dx.set(r, c, inv * (dxhat - mean_dxhat - xhat_row[c] * mean_dxhat_xhat));
        }
    }
    dx
}

fn softmax_rows(scores: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(scores.rows(), scores.cols());
    for r in 0..scores.rows() {
        let row = scores.row(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for c in 0..row.len() {
            let e = (row[c] - max).exp();
            out.set(r, c, e);
            sum += e;
        }
        for c in 0..row.len() {
            out.set(r, c, out.get(r, c) / sum);
        }
    }
    out
}

/// ds = a ⊙ (da - <da, a>) per row.
fn softmax_backward(attn: &Matrix, d_attn: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(attn.rows(), attn.cols());
    for r in 0..attn.rows() {
        let a = attn.row(r);
        let da = d_attn.row(r);
        let inner = dot(a, da);
        for c in 0..a.len() {
            out.set(r, c, a[c] * (da[c] - inner));
        }
    }
    out
}

struct LayerCache {
    ln1: LnCache,
    y1: Matrix,
    q: Matrix,
    k: Matrix,
    v: Matrix,
    attn: Vec<Matrix>,
    concat: Matrix,
    ln2: LnCache,
    y2: Matrix,
    ff_a: Matrix,
    ff_g: Matrix,
}

pub(crate) struct ForwardCache {
    x_m: Matrix,
    mite_a1: Matrix,
    mite_g1: Matrix,
    patched: [Matrix; 4],
    layers: Vec<LayerCache>,
    h_final: Matrix,
    pooled: Vec<f64>,
    pub embedding: Vec<f64>,
    pub prob: f64,
}

fn check_bundle(params: &ModelParams, bundle: &EncodingBundle) -> Result<()> {
    let d = &params.dims;
    let checks = [
        ("combined-node", bundle.x_c.cols(), 3 * d.node_dim),
        ("edge", bundle.x_e.cols(), d.edge_dim),
        ("time", bundle.x_t.cols(), d.time_dim),
        ("mite", bundle.x_m.cols(), 2 * d.mite_k),
    ];
    for (name, got, want) in checks {
        if got != want {
            return Err(Error::invalid(format!(
                "bundle {name} width {got} does not match model width {want}"
            )));
        }
    }
    Ok(())
}

/// Full forward pass. `patch_perm`, when set, re-orders the patch rows
/// before the sequence stack; the architecture carries no positional
/// information, so outputs must not depend on it.
pub(crate) fn forward_cached(
    params: &ModelParams,
    bundle: &EncodingBundle,
    patch_perm: Option<&[usize]>,
) -> Result<ForwardCache> {
    check_bundle(params, bundle)?;
    let dims = &params.dims;

    // MITE projection: two-layer map on each raw row.
    let mut mite_a1 = bundle.x_m.matmul(&params.mite_w1);
    mite_a1.add_bias(&params.mite_b1);
    let mite_g1 = mite_a1.map(gelu);
    let mut mite_out = mite_g1.matmul(&params.mite_w2);
    mite_out.add_bias(&params.mite_b2);

    // Patch, then align each encoding to the common width.
    let mut patched = [
        patch_rows(&bundle.x_c, dims.patch),
        patch_rows(&bundle.x_e, dims.patch),
        patch_rows(&bundle.x_t, dims.patch),
        patch_rows(&mite_out, dims.patch),
    ];
    if let Some(perm) = patch_perm {
        for p in &mut patched {
            *p = p.permute_rows(perm);
        }
    }
    let align = &params.align;
    let aligned: Vec<Matrix> = [
        (&patched[0], &align.w_c, &align.b_c),
        (&patched[1], &align.w_e, &align.b_e),
        (&patched[2], &align.w_t, &align.b_t),
        (&patched[3], &align.w_m, &align.b_m),
    ]
    .into_iter()
    .map(|(x, w, b)| {
        let mut z = x.matmul(w);
        z.add_bias(b);
        z
    })
    .collect();
    let z = Matrix::hcat(&[&aligned[0], &aligned[1], &aligned[2], &aligned[3]]);

    // Pre-norm residual stack.
    let heads = dims.heads;
    let hd = dims.head_dim();
    let scale = 1.0 / (hd as f64).sqrt();
    let mut h = z;
    let mut layer_caches = Vec::with_capacity(params.layers.len());
    for (li, layer) in params.layers.iter().enumerate() {
        let (y1, ln1) = layer_norm(&h, &layer.ln1_gain, &layer.ln1_bias);
        let mut q = y1.matmul(&layer.w_q);
        q.add_bias(&layer.b_q);
        let k = y1.matmul(&layer.w_k);
        let mut v = y1.matmul(&layer.w_v);
        v.add_bias(&layer.b_v);

        let mut concat = Matrix::zeros(h.rows(), dims.width());
        let mut attns = Vec::with_capacity(heads);
        for head in 0..heads {
            let (from, to) = (head * hd, (head + 1) * hd);
            let qh = q.col_slice(from, to);
            let kh = k.col_slice(from, to);
            let vh = v.col_slice(from, to);
            let mut scores = qh.matmul_nt(&kh);
            for s in scores.data_mut() {
                *s *= scale;
            }
            let attn = softmax_rows(&scores);
            let oh = attn.matmul(&vh);
            concat.set_col_slice(from, &oh);
            attns.push(attn);
        }
        let mut attn_out = concat.matmul(&layer.w_o);
        attn_out.add_bias(&layer.b_o);
        let mut h_mid = attn_out;
        h_mid.add_scaled(&h, 1.0);

        let (y2, ln2) = layer_norm(&h_mid, &layer.ln2_gain, &layer.ln2_bias);
        let mut ff_a = y2.matmul(&layer.w_ff1);
        ff_a.add_bias(&layer.b_ff1);
        let ff_g = ff_a.map(gelu);
        let mut h_out = ff_g.matmul(&layer.w_ff2);
        h_out.add_bias(&layer.b_ff2);
        h_out.add_scaled(&h_mid, 1.0);

        if !h_out.is_finite() {
            return Err(Error::NonFinite(format!("layer {li}")));
        }
        layer_caches.push(LayerCache { ln1, y1, q, k, v, attn: attns, concat, ln2, y2, ff_a, ff_g });
        h = h_out;
    }

    // Mean pooling over patch rows, affine head, sigmoid scorer.
    let pooled = h.row_mean();
    let mut embedding = params.b_out.clone();
    for (j, e) in embedding.iter_mut().enumerate() {
        for (i, &p) in pooled.iter().enumerate() {
            *e += p * params.w_out.get(i, j);
        }
    }
    let logit = dot(&embedding, &params.w_score) + params.b_score;
    if !logit.is_finite() {
        return Err(Error::NonFinite("scorer".to_string()));
    }
    Ok(ForwardCache {
        x_m: bundle.x_m.clone(),
        mite_a1,
        mite_g1,
        patched,
        layers: layer_caches,
        h_final: h,
        pooled,
        embedding,
        prob: sigmoid(logit),
    })
}

/// Pair embedding and interaction probability for one bundle.
pub fn forward(params: &ModelParams, bundle: &EncodingBundle) -> Result<(Vec<f64>, f64)> {
    let cache = forward_cached(params, bundle, None)?;
    Ok((cache.embedding, cache.prob))
}

/// [`forward`] with the patch rows re-ordered by `perm`.
pub fn forward_permuted(
    params: &ModelParams,
    bundle: &EncodingBundle,
    perm: &[usize],
) -> Result<(Vec<f64>, f64)> {
    let cache = forward_cached(params, bundle, Some(perm))?;
    Ok((cache.embedding, cache.prob))
}

/// Interaction probability only.
pub fn predict(params: &ModelParams, bundle: &EncodingBundle) -> Result<f64> {
    Ok(forward_cached(params, bundle, None)?.prob)
}

/// Un-patches a gradient: rows of the patched matrix scatter back onto the
/// original `s` rows; padding slots are dropped.
fn unpatch(d_patched: &Matrix, s: usize, cols: usize, p: usize) -> Matrix {
    let mut out = Matrix::zeros(s, cols);
    for r in 0..s {
        let (patch, slot) = (r / p, r % p);
        out.row_mut(r).copy_from_slice(&d_patched.row(patch)[slot * cols..(slot + 1) * cols]);
    }
    out
}

/// Reverse accumulation through the whole forward pass for one example,
/// starting from d(loss)/d(logit). Accumulates into `grads`, which must be
/// shaped like `params`.
pub(crate) fn backward(
    params: &ModelParams,
    cache: &ForwardCache,
    d_logit: f64,
    grads: &mut ModelParams,
) {
    let dims = &params.dims;
    let width = dims.width();
    let heads = dims.heads;
    let hd = dims.head_dim();
    let scale = 1.0 / (hd as f64).sqrt();

    // Scorer.
    grads.b_score += d_logit;
    for (g, &e) in grads.w_score.iter_mut().zip(&cache.embedding) {
        *g += d_logit * e;
    }
    let d_emb: Vec<f64> = params.w_score.iter().map(|w| d_logit * w).collect();

    // Output affine.
    for (j, &de) in d_emb.iter().enumerate() {
        grads.b_out[j] += de;
        for (i, &p) in cache.pooled.iter().enumerate() {
            let prev = grads.w_out.get(i, j);
            grads.w_out.set(i, j, prev + de * p);
        }
    }
    let mut d_pooled = vec![0.0; width];
    for (i, dp) in d_pooled.iter_mut().enumerate() {
        for (j, &de) in d_emb.iter().enumerate() {
            *dp += params.w_out.get(i, j) * de;
        }
    }

    // Mean pooling.
    let n_rows = cache.h_final.rows();
    let mut d_h = Matrix::zeros(n_rows, width);
    for r in 0..n_rows {
        for c in 0..width {
            d_h.set(r, c, d_pooled[c] / n_rows as f64);
        }
    }

    // Residual stack, in reverse.
    for (li, layer) in params.layers.iter().enumerate().rev() {
        let lc = &cache.layers[li];
        let gl = &mut grads.layers[li];

        // h_out = ff_g W2 + b2 + h_mid
        let d_ff_out = &d_h;
        gl.w_ff2.add_scaled(&lc.ff_g.matmul_tn(d_ff_out), 1.0);
        for (g, s) in gl.b_ff2.iter_mut().zip(d_ff_out.col_sums()) {
            *g += s;
        }
        let d_ff_g = d_ff_out.matmul_nt(&layer.w_ff2);
        let mut d_ff_a = Matrix::zeros(d_ff_g.rows(), d_ff_g.cols());
        for r in 0..d_ff_a.rows() {
            for c in 0..d_ff_a.cols() {
                d_ff_a.set(r, c, d_ff_g.get(r, c) * gelu_grad(lc.ff_a.get(r, c)));
            }
        }
        gl.w_ff1.add_scaled(&lc.y2.matmul_tn(&d_ff_a), 1.0);
        for (g, s) in gl.b_ff1.iter_mut().zip(d_ff_a.col_sums()) {
            *g += s;
        }
        let d_y2 = d_ff_a.matmul_nt(&layer.w_ff1);
        let mut d_h_mid =
            layer_norm_backward(&d_y2, &lc.ln2, &layer.ln2_gain, &mut gl.ln2_gain, &mut gl.ln2_bias);
        d_h_mid.add_scaled(&d_h, 1.0); // residual

        // h_mid = concat W_o + b_o + input
        let d_attn_out = &d_h_mid;
        gl.w_o.add_scaled(&lc.concat.matmul_tn(d_attn_out), 1.0);
        for (g, s) in gl.b_o.iter_mut().zip(d_attn_out.col_sums()) {
            *g += s;
        }
        let d_concat = d_attn_out.matmul_nt(&layer.w_o);

        let mut d_q = Matrix::zeros(d_h_mid.rows(), width);
        let mut d_k = Matrix::zeros(d_h_mid.rows(), width);
        let mut d_v = Matrix::zeros(d_h_mid.rows(), width);
        for head in 0..heads {
            let (from, to) = (head * hd, (head + 1) * hd);
            let d_oh = d_concat.col_slice(from, to);
            let attn = &lc.attn[head];
            let qh = lc.q.col_slice(from, to);
            let kh = lc.k.col_slice(from, to);
            let vh = lc.v.col_slice(from, to);
            let d_attn = d_oh.matmul_nt(&vh);
            let d_vh = attn.matmul_tn(&d_oh);
            let mut d_scores = softmax_backward(attn, &d_attn);
            for s in d_scores.data_mut() {
                *s *= scale;
            }
            let d_qh = d_scores.matmul(&kh);
            let d_kh = d_scores.matmul_tn(&qh);
            d_q.set_col_slice(from, &d_qh);
            d_k.set_col_slice(from, &d_kh);
            d_v.set_col_slice(from, &d_vh);
        }
        gl.w_q.add_scaled(&lc.y1.matmul_tn(&d_q), 1.0);
        gl.w_k.add_scaled(&lc.y1.matmul_tn(&d_k), 1.0);
        gl.w_v.add_scaled(&lc.y1.matmul_tn(&d_v), 1.0);
        for (g, s) in gl.b_q.iter_mut().zip(d_q.col_sums()) {
            *g += s;
        }
        for (g, s) in gl.b_v.iter_mut().zip(d_v.col_sums()) {
            *g += s;
        }
        let mut d_y1 = d_q.matmul_nt(&layer.w_q);
        d_y1.add_scaled(&d_k.matmul_nt(&layer.w_k), 1.0);
        d_y1.add_scaled(&d_v.matmul_nt(&layer.w_v), 1.0);
        let mut d_input =
            layer_norm_backward(&d_y1, &lc.ln1, &layer.ln1_gain, &mut gl.ln1_gain, &mut gl.ln1_bias);
        d_input.add_scaled(&d_h_mid, 1.0); // residual

        d_h = d_input;
    }

    // Alignment: dZ splits into the four aligned blocks.
    let d = dims.aligned_dim;
    let blocks = [
        (0, &cache.patched[0], &mut grads.align.w_c, &mut grads.align.b_c),
        (1, &cache.patched[1], &mut grads.align.w_e, &mut grads.align.b_e),
        (2, &cache.patched[2], &mut grads.align.w_t, &mut grads.align.b_t),
        (3, &cache.patched[3], &mut grads.align.w_m, &mut grads.align.b_m),
    ];
    let mut d_patched_m: Option<Matrix> = None;
    for (bi, patched, w_grad, b_grad) in blocks {
        let d_z = d_h.col_slice(bi * d, (bi + 1) * d);
        w_grad.add_scaled(&patched.matmul_tn(&d_z), 1.0);
        for (g, s) in b_grad.iter_mut().zip(d_z.col_sums()) {
            *g += s;
        }
        if bi == 3 {
            d_patched_m = Some(d_z.matmul_nt(&params.align.w_m));
        }
    }

    // MITE projection: only the mite path carries parameters upstream of
    // alignment, so input gradients stop here for the other three.
    let s = cache.x_m.rows();
    let d_mite_out = unpatch(&d_patched_m.expect("mite block"), s, dims.mite_dim, dims.patch);
    grads.mite_w2.add_scaled(&cache.mite_g1.matmul_tn(&d_mite_out), 1.0);
    for (g, sum) in grads.mite_b2.iter_mut().zip(d_mite_out.col_sums()) {
        *g += sum;
    }
    let d_g1 = d_mite_out.matmul_nt(&params.mite_w2);
    let mut d_a1 = Matrix::zeros(s, dims.mite_dim);
    for r in 0..s {
        for c in 0..dims.mite_dim {
            d_a1.set(r, c, d_g1.get(r, c) * gelu_grad(cache.mite_a1.get(r, c)));
        }
    }
    grads.mite_w1.add_scaled(&cache.x_m.matmul_tn(&d_a1), 1.0);
    for (g, sum) in grads.mite_b1.iter_mut().zip(d_a1.col_sums()) {
        *g += sum;
    }
}

/// Probability clamp used when evaluating the loss; gradients use the exact
/// sigmoid-cross-entropy form `p - y`, which stays well-defined either way.
const PROB_CLAMP: f64 = 1e-12;

pub(crate) fn bce_loss(prob: f64, label: f64) -> f64 {
    let p = prob.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    -(label * p.ln() + (1.0 - label) * (1.0 - p).ln())
}

/// Mean binary cross-entropy over the batch and gradients for every
/// parameter, computed by reverse accumulation through the full forward
/// pass (MITE projection and alignment included).
pub fn loss_and_grad(params: &ModelParams, batch: &[Example]) -> Result<(f64, ModelParams)> {
    if batch.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    let mut grads = params.zeros_like();
    let mut loss = 0.0;
    for example in batch {
        let cache = forward_cached(params, &example.bundle, None)?;
        loss += bce_loss(cache.prob, example.label);
        backward(params, &cache, cache.prob - example.label, &mut grads);
    }
    let inv = 1.0 / batch.len() as f64;
    grads.scale(inv);
    Ok((loss * inv, grads))
}
