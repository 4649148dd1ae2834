//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph loading, refinement, training and the harness.
#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid node id {id} for graph with {count} nodes")]
    InvalidNode { id: usize, count: usize },
    #[error("graph with {nodes} nodes exceeds the exhaustive-search bound of {bound}")]
    SearchBound { nodes: usize, bound: usize },
    #[error("refinement order k={0} is not supported (only k=1 and k=2)")]
    UnsupportedOrder(usize),
    #[error("{0}")]
    InvalidInput(String),
    #[error("non-finite activation in {0}")]
    NonFinite(String),
    #[error("training diverged at epoch {epoch}, batch {batch}: loss={loss}")]
    Diverged { epoch: usize, batch: usize, loss: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
