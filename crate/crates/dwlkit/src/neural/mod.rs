//! Desk-scale pair-level transformer link predictor.
//!
//! The forward pass aligns a pair's joint-neighborhood encodings to a common
//! width, runs them through pre-norm residual attention blocks, mean-pools
//! over patches and scores the pooled embedding with an affine-sigmoid head.
//! Gradients are written by hand (reverse accumulation through every
//! operation) and verified against central finite differences.

mod gradcheck;
mod model;
mod params;
mod train;

pub use gradcheck::{finite_diff_check, BlockError, GradReport};
pub use model::{forward, forward_permuted, loss_and_grad, predict, Example};
pub use params::{load_params, save_params, LayerParams, ModelDims, ModelParams};
pub use train::{build_example, evaluate, train, EpochStats, TrainConfig};
