use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Word text does not match the letter or block grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Jacobi sweep limit was hit before the off-diagonal mass
    /// dropped below tolerance. Signals pathological input.
    #[error("eigensolver did not converge within {0} sweeps")]
    NonConvergence(usize),

    /// A precondition on an argument value was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An enumeration or evaluation budget was exhausted.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
