use thiserror::Error;

use crate::coeffs::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("a({index}) = {value} is not positive")]
    NonPositiveCoefficient { index: usize, value: f64 },

    #[error("coefficient table has no continuation rule")]
    MissingContinuation,

    #[error("coefficient table is empty or inconsistent: {0}")]
    BadTable(String),

    #[error("scaled state left [1e-300, 1e300] at n = {n} (|p| = {magnitude:e}); branch or convention bug")]
    ScaleOutOfRange { n: usize, magnitude: f64 },

    #[error("operation requires regime {expected:?} but d = {d}")]
    RegimeMismatch { expected: Regime, d: f64 },

    #[error("x = {x} lies in the band of indices up to {last_checked} without leaving; regime misclassified")]
    XInBand { x: f64, last_checked: usize },

    #[error("x = {x} is outside the band at n = {n} (x enters every band only after n = {cutoff})")]
    XOutsideBand { x: f64, n: usize, cutoff: usize },

    #[error("x = {x} is within {distance:e} of the spectrum (margin {margin:e})")]
    XTooCloseToSpectrum { x: f64, distance: f64, margin: f64 },

    #[error("sign change near x = {x} but |g'| = {derivative:e}; double root suspected")]
    DoubleRootSuspected { x: f64, derivative: f64 },

    #[error("mass at x = {x} is {mass:e} (not positive)")]
    NegativeMass { x: f64, mass: f64 },

    #[error("truncation N = {n} too small for moment order {k}")]
    TruncationTooSmall { n: usize, k: usize },

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index}")]
    EigenNoConvergence { index: usize },

    #[error("measure grid too coarse: refinement disagreement {disagreement:e} exceeds {limit:e}")]
    GridTooCoarse { disagreement: f64, limit: f64 },

    #[error("unsupported classical weight `{0}`")]
    UnsupportedWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
