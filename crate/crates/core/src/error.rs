use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid problem: {0}")]
    Invalid(String),

    #[error("empty max term at index {0}")]
    EmptyMaxTerm(usize),

    #[error("non-finite coefficient in {0}")]
    NonFinite(String),

    #[error("uncertainty set is unbounded along coordinate {0}")]
    UnboundedSet(usize),

    #[error("uncertainty set is empty")]
    EmptySet,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration cap exceeded: {count} > {cap}")]
    CapExceeded { count: f64, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit exceeded after {0} pivots")]
    IterationLimit(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("scenario cut limit exceeded ({0} cuts)")]
    CutLimit(usize),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
