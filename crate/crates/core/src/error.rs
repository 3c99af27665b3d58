use thiserror::Error;

/// Errors raised by graph construction, spectral synthesis and walk evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("graph is disconnected; {0} requires a connected threshold graph")]
    Disconnected(&'static str),

    #[error("graph is not a binary threshold graph (complete split graph)")]
    NotBinary,

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("entry ({v}, {w}) is outside the closed-form index coverage")]
    Coverage { v: usize, w: usize },

    #[error("{eigenvalue} is not an eigenvalue of this Laplacian")]
    UnknownEigenvalue { eigenvalue: u64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("matrix dimension {dim} exceeds the dense oracle limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
