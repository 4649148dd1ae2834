//! Toolkit for continuous-time dynamic graphs.
//!
//! What's inside:
//!
//! * [`temporal`] — the event-stream graph model, per-pair interaction
//!   timelines with time-censored (history) and interval views, a
//!   historical-neighbor index, and an exhaustive isomorphism oracle for
//!   small graphs.
//! * [`dwl`] — dynamic Weisfeiler-Lehman color refinement on nodes (k=1)
//!   and node pairs (k=2), cross-graph distinguishing verdicts, symbolic
//!   (hash-injective) message-passing simulators, and the classic static
//!   1-WL cross-check.
//! * [`encode`] — the feature pipeline: multi-interacted time encodings
//!   (MITE), neighbor co-occurrence counts, Fourier time encodings, joint
//!   neighborhood bundles, patching and dimension alignment.
//! * [`neural`] — a desk-scale pair-level transformer link predictor with
//!   hand-written gradients, finite-difference verification, and a seeded
//!   training loop.
//! * [`harness`] — chronological splits, inductive masking, ranking
//!   metrics, synthetic generators, and the expressiveness property suite.
//!
//! The `dwlkit` binary exposes the same functionality as subcommands; see
//! the README for usage.

pub mod cli;
pub mod dwl;
pub mod encode;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod neural;
pub mod temporal;

pub use error::{Error, Result};
