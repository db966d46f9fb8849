use thiserror::Error;

/// Errors raised anywhere in the analysis stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {check}: {detail}")]
    ValidationError { check: String, detail: String },

    #[error("no kernel at xi = {xi:?}: smallest |eigenvalue| ratio {ratio:e} exceeds tolerance")]
    NoKernel { xi: Vec<f64>, ratio: f64 },

    #[error("grid too coarse: tangential root suspected near xi = {xi:?} (|det| = {det:e})")]
    GridTooCoarse { xi: Vec<f64>, det: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("outside trust region: {0}")]
    OutsideTrustRegion(String),

    #[error("corrector diverged at r = {r}")]
    CorrectorDiverged { r: f64 },

    #[error("insufficient samples: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("implicit midpoint inner solve diverged at t = {t}")]
    InnerSolveDiverged { t: f64 },

    #[error("unknown builtin system `{0}`")]
    UnknownBuiltin(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
