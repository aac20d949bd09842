use thiserror::Error;

/// Errors produced by tensor, linear-algebra, training, and I/O operations.
#[derive(Debug, Error)]
pub enum GttnError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid axis subset: {0}")]
    InvalidSubset(String),

    #[error("invalid tensor order: {0}")]
    InvalidOrder(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid weight mode: {0}")]
    InvalidMode(String),

    #[error("SVD failed to converge after {iterations} sweeps")]
    NumericalFailure { iterations: usize },

    #[error("non-finite gradient at iteration {iteration}, block {block} (norm {norm})")]
    NonFiniteGradient {
        iteration: usize,
        block: String,
        norm: f64,
    },

    #[error("format error in {path}: {message}")]
    Format { path: String, message: String },

    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, GttnError>;
