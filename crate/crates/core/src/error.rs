//! Error type shared by the whole crate.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside its documented domain (non-finite input,
    /// nonpositive spacing, empty list, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A shape parameter that must be nonzero was zero.
    #[error("degenerate shape parameter: b must be nonzero")]
    DegenerateShape,

    /// A kernel matrix violated a structural requirement (for example a
    /// nonpositive diagonal during normalization, or a zero trace).
    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    /// The operation is only defined for a subset of RBF families.
    #[error("unsupported RBF kind for this operation: {0}")]
    UnsupportedKind(String),

    /// Mismatched dimensions between a network, a point, or a problem.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The training loss became non-finite.
    #[error("training diverged at iteration {iteration}: loss is not finite")]
    Diverged { iteration: usize },

    /// A problem name could not be resolved.
    #[error("unknown problem: {0}")]
    UnknownProblem(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
