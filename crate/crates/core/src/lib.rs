//! Spectral measures of orthonormal polynomials whose recurrence
//! coefficients grow without bound.
//!
//! The pipeline runs from a [`CoefficientSequence`] through the forward
//! recurrence ([`recurrence`]) to the limit functions `g`, `g1`
//! ([`limits`]) and from there to densities, point spectra and frozen
//! measures ([`measures`]). [`asymptotics`] turns the large-`n` formulas
//! into residuals and [`oracles`] holds the independent checks (tridiagonal
//! eigenvalues, Gauss rules, closed-form weights).
//!
//! ```
//! use jacobi_spectra::{measures, CoefficientSequence};
//!
//! let hermite = CoefficientSequence::hermite();
//! let v = measures::ac_density(&hermite, 0.0, &Default::default()).unwrap();
//! assert!((v.density - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-4);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod limits;
pub mod maps;
pub mod measures;
pub mod oracles;
pub mod recurrence;
pub mod spectral;

pub use coeffs::{
    check_hypotheses, epsilon, epsilon_tail, preset, CoefficientSequence, Continuation,
    HypothesisReport, Params, Regime, SequenceSpec,
};
pub use error::{Error, Result};
pub use limits::{eval_g, eval_g_real_discrete, LimitOptions, LimitValue};
pub use maps::{rho, transfer, TransferPair};
pub use recurrence::ScaledState;
pub use spectral::{MeasureKind, SpectralMeasure};
