use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::bundle::EncodingBundle;

/// Learnable alignment of the four patched encodings to a common width:
/// each weight maps `P·d_*` to `d`, biases are length `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    pub w_c: Matrix,
    pub b_c: Vec<f64>,
    pub w_e: Matrix,
    pub b_e: Vec<f64>,
    pub w_t: Matrix,
    pub b_t: Vec<f64>,
    pub w_m: Matrix,
    pub b_m: Vec<f64>,
}

impl Alignment {
    pub fn aligned_dim(&self) -> usize {
        self.w_c.cols()
    }
}

/// The aligned, concatenated input rows of the sequence model:
/// `n_p × 4d` after patching, alignment and concatenation.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchedEncodings {
    pub z: Matrix,
    pub n_p: usize,
    pub p: usize,
}

/// Groups `p` consecutive rows into one row of width `p * cols`, zero-padding
/// the tail. A zero-row input still yields one all-padding patch so that
/// downstream mean pooling stays defined.
pub fn patch_rows(x: &Matrix, p: usize) -> Matrix {
    assert!(p >= 1, "patch size must be positive");
    let n_p = x.rows().div_ceil(p).max(1);
    let mut out = Matrix::zeros(n_p, p * x.cols());
    for r in 0..x.rows() {
        let (patch, slot) = (r / p, r % p);
        out.row_mut(patch)[slot * x.cols()..(slot + 1) * x.cols()].copy_from_slice(x.row(r));
    }
    out
}

fn check_shape(name: &str, x: &Matrix, w: &Matrix, b: &[f64], p: usize, d: usize) -> Result<()> {
    if w.rows() != p * x.cols() || w.cols() != d || b.len() != d {
        return Err(Error::invalid(format!(
            "alignment weights for {name}: expected ({} x {d}) with bias {d}, got ({} x {}) with bias {}",
            p * x.cols(),
            w.rows(),
            w.cols(),
            b.len()
        )));
    }
    Ok(())
}

/// Reshapes each encoding into `n_p` patches, maps it through its alignment
/// weights and concatenates the four aligned blocks.
pub fn patch_and_align(
    bundle: &EncodingBundle,
    p: usize,
    align: &Alignment,
) -> Result<PatchedEncodings> {
    if p == 0 {
        return Err(Error::invalid("patch size must be positive"));
    }
    let d = align.aligned_dim();
    check_shape("combined-node", &bundle.x_c, &align.w_c, &align.b_c, p, d)?;
    check_shape("edge", &bundle.x_e, &align.w_e, &align.b_e, p, d)?;
    check_shape("time", &bundle.x_t, &align.w_t, &align.b_t, p, d)?;
    check_shape("mite", &bundle.x_m, &align.w_m, &align.b_m, p, d)?;

    let aligned = |x: &Matrix, w: &Matrix, b: &[f64]| -> Matrix {
        let mut z = patch_rows(x, p).matmul(w);
        z.add_bias(b);
        z
    };
    let z_c = aligned(&bundle.x_c, &align.w_c, &align.b_c);
    let z_e = aligned(&bundle.x_e, &align.w_e, &align.b_e);
    let z_t = aligned(&bundle.x_t, &align.w_t, &align.b_t);
    let z_m = aligned(&bundle.x_m, &align.w_m, &align.b_m);
    let z = Matrix::hcat(&[&z_c, &z_e, &z_t, &z_m]);
    let n_p = z.rows();
    Ok(PatchedEncodings { z, n_p, p })
}
