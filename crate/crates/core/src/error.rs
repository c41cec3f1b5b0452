use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular to working precision (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("SVD did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("function has unbounded support")]
    UnboundedSupport,

    #[error("invalid rates: {0}")]
    InvalidRates(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("no sign change of the Zak transform was bracketed on [0, 1)")]
    NoBracket,

    #[error("rank deficient block: rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
}
