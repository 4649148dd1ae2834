//! Feature pipeline for pair-level link prediction.
//!
//! Everything here is a pure function of the immutable graph structures:
//! multi-interacted time encodings (MITE) and their count-degenerate
//! neighbor co-occurrence form, Fourier time encodings, the per-neighbor
//! encoding bundle of a target pair, and patching plus dimension alignment.
//! The learnable MITE projection lives with the model; this module emits
//! the raw interval vectors.

mod bundle;
mod mite;
mod patch;
mod time;

pub use bundle::{build_encoding_bundle, EncodingBundle};
pub use mite::{mite_raw, ncoe, MiteVector};
pub use patch::{patch_and_align, patch_rows, Alignment, PatchedEncodings};
pub use time::{time_encode, TimeEncoding};
