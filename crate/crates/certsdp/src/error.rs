//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigenvalue iteration did not converge after {iters} iterations (best value {best_value}, residual {residual})")]
    EigNotConverged {
        iters: usize,
        best_value: f64,
        residual: f64,
    },
    #[error("conjugate gradient did not converge after {iters} iterations (relative residual {rel_residual})")]
    CgNotConverged { iters: usize, rel_residual: f64 },
    #[error("operator is not positive definite: detected curvature {curvature}")]
    IndefiniteOperator { curvature: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig}")]
    IndefiniteMatrix { min_eig: f64 },
    #[error("certificate ball not certified: mu = {mu} <= 0")]
    BallNotCertified { mu: f64 },
    #[error("prox solve hit the iteration cap at {iters} iterations (best certified gap {gap}, target {target})")]
    ProxNotCertified { iters: usize, gap: f64, target: f64 },
    #[error("initial gap estimate failed: {0}")]
    GapEstimate(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported instance format version {0}")]
    FormatVersion(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
