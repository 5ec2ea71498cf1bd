use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("operator of dimension {0} has no qubit factor (dimension must be even)")]
    OddDimension(usize),

    #[error("{what} is not {role}: max deviation {deviation:.3e}")]
    Validation {
        what: String,
        role: &'static str,
        deviation: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown attack `{0}`")]
    UnknownAttack(String),

    #[error("invalid parameters: {0}")]
    Parameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
