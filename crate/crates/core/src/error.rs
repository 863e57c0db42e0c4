use thiserror::Error;

/// Errors raised by the library. Messages are stable and matched by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate lattice")]
    DegenerateLattice,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("translation vector not in lattice")]
    NotInLattice,
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("index not invertible in R")]
    IndexNotInvertible,
    #[error("moment beyond truncation")]
    MomentBeyondTruncation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("D must be squarefree and > 1, got {0}")]
    NotSquarefree(i64),
    #[error("relation search incomplete; raise bound ({0})")]
    SearchIncomplete(String),
    #[error("S must contain ramified places")]
    RamifiedNotInS,
    #[error("T must be disjoint from S")]
    TMeetsS,
    #[error("non-integral outside allowance")]
    NonIntegralOutsideAllowance,
    #[error("forbidden primes in X: {0}")]
    ForbiddenPrimes(String),
}

pub type Result<T> = std::result::Result<T, Error>;
