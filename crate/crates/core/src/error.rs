use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent p = {0} (need p > 1)")]
    InvalidExponent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("ball of radius {radius} at ({x}, {y}) contains no element barycenter")]
    EmptyBall { x: f64, y: f64, radius: f64 },

    #[error("point ({x}, {y}) is closer than {margin} to the domain boundary")]
    TooCloseToBoundary { x: f64, y: f64, margin: f64 },

    #[error("Kacanov iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        energy_trace: Vec<f64>,
    },

    #[error("conjugate gradients stalled after {iterations} iterations (relative residual {relative:e})")]
    LinearSolve { iterations: usize, relative: f64 },

    #[error("Dini integral diverges: {0}")]
    DiniDivergence(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("Luxemburg norm has no finite minimizer: {0}")]
    NoFiniteNorm(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
