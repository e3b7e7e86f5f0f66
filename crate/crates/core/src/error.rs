use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice parameters: {0}")]
    InvalidSpec(String),

    #[error("invalid drive parameters: {0}")]
    InvalidDrive(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dual transform not unitary for this (L, alpha0): L = {size}, alpha0 = {p}/{q}")]
    NotUnitary { size: usize, p: u64, q: u64 },

    #[error("tail tolerance {tail_tol:e} needs j_max > {cap} (unreachable)")]
    TailUnreachable { tail_tol: f64, cap: usize },

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("full eigenvector set for L = {0} requires allow_full_vectors")]
    FullVectorsGated(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("propagator unitarity defect {defect:e} exceeds {threshold:e}; increase steps")]
    NonUnitary { defect: f64, threshold: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
