use thiserror::Error;

/// Errors raised by model construction, evaluation, and the oracle engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("default probability p = {0} must lie strictly inside (0, 1)")]
    InvalidProbability(f64),

    #[error("portfolio size n = {0} must be at least 2")]
    InvalidCount(usize),

    #[error("rho = {rho} is not admissible for p = {p}: it must lie inside the open interval ({lower}, {upper}) and at least 1e-10 from either end")]
    RhoOutOfRange {
        rho: f64,
        p: f64,
        lower: f64,
        upper: f64,
    },

    #[error("second moment q = {q} must lie strictly inside (0, p) with p = {p}")]
    SecondMomentOutOfRange { q: f64, p: f64 },

    #[error("confidence level {0} must lie strictly inside (0, 1)")]
    InvalidLevel(f64),

    #[error("bit vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("n = {n} exceeds the enumeration cap of {max}")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("scan grid needs at least 3 points, got {0}")]
    GridTooCoarse(usize),

    #[error("grid margin {margin} leaves no room inside ({lower}, {upper})")]
    InvalidMargin { margin: f64, lower: f64, upper: f64 },

    #[error("sample count must be at least 1")]
    EmptySample,

    #[error("MaxEnt fit did not converge after {iterations} iterations (residual norm {residual_norm:e})")]
    NonConvergence {
        iterations: usize,
        residual_norm: f64,
    },
}

pub type Result<T> = std::result::Result<T, ModelError>;
