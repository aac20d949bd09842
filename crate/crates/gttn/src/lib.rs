//! Generalized tensor trace norm regularization for multi-task learning.
//!
//! The central object is a convex combination of matrix trace norms over
//! all canonical flattenings of a parameter tensor, with combination
//! weights learned jointly with the model via a softmax reparameterization.
//! The crate also provides the Tucker, tensor-train, and last-axis
//! flattening baselines, a multi-task trainer, synthetic planted-low-rank
//! data generation, and generalization-bound diagnostics.
//!
//! See the `examples/` directory for one runnable example per capability;
//! the `gttn` binary exposes the same machinery as batch subcommands.

pub mod analysis;
pub mod cli;
pub mod data;
pub mod error;
pub mod linalg;
pub mod model;
pub mod regularizers;
pub mod tensor;
pub mod trainer;

pub use error::{GttnError, Result};
