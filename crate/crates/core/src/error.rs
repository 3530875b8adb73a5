use std::path::PathBuf;

use thiserror::Error;

use crate::types::Portfolio;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected return vector: {0}")]
    InvalidReturn(String),

    #[error("invalid portfolio: {0}")]
    InvalidPortfolio(String),

    #[error("risk aversion must be finite and non-negative, got {0}")]
    InvalidRiskAversion(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("moment accumulator is empty")]
    EmptyAccumulator,

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    Asymmetric { max_asymmetry: f64 },

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("solver did not converge in {iterations} iterations (kkt residual {residual:e})")]
    ConvergenceFailure {
        best: Portfolio,
        residual: f64,
        iterations: usize,
    },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("non-positive portfolio return {value} at step {step}")]
    Bankruptcy { step: usize, value: f64 },

    #[error("series ratio sigma/mu = {ratio} is outside the validated regime (< 0.5)")]
    DivergenceRisk { ratio: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}:{line}: parse error: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}:{line}: column {column}: {message}", path.display())]
    Data {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },

    #[error("{}:{line}: return norm {norm} exceeds bound {bound}", path.display())]
    BoundViolation {
        path: PathBuf,
        line: u64,
        norm: f64,
        bound: f64,
    },

    #[error("sampler rejected {0} consecutive draws; bounds are misconfigured")]
    MisconfiguredBounds(usize),

    #[error("market generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
