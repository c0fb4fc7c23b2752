//! Minimal dense-tensor core: row-major f64 tensors, a reverse-mode tape
//! over a fixed op vocabulary, the AdamW optimizer, a finite-difference
//! gradient verifier, and the checkpoint container.
//!
//! Everything here is single-threaded and 64-bit, so identical seeds give
//! bit-identical results.

mod checkpoint;
mod gradcheck;
mod graph;
mod optim;
mod tensor;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use gradcheck::{check_gradients, GradCheckReport, DEFAULT_SAMPLE_CUTOFF};
pub use graph::{Graph, NodeId};
pub use optim::{adamw_step, OptimizerState, ParamSet, Parameter};
pub use tensor::{cross_entropy, layer_norm, softmax, Tensor};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("softmax axis invalid: {0}")]
    EmptyAxis(String),
    #[error("backward already ran on this tape; build a new graph")]
    BackwardAlreadyRun,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}
