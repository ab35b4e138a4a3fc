//! The limit functions `g = lim phi_hat(n)` and `g1 = lim phi1_hat(n)`.
//!
//! Evaluation walks the recurrence through doubling checkpoints
//! `1, 2, 4, ...` and stops when two things agree: the successive-doubling
//! difference is below `tol / 2`, and the tail bound `4 C sum_{k>n} eps(k)`
//! is below `tol`. `C` is fitted by least squares from the first three
//! checkpoint differences against the matching `eps` sums.

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::{epsilon, least_squares_origin, power_tail, CoefficientSequence, Regime};
use crate::error::{Error, Result};
use crate::maps::{last_band_index, transfer, upper};
use crate::recurrence::ScaledState;

/// Quantity watched by the Cauchy test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Target {
    /// `|phi_hat(2n) - phi_hat(n)|` (and the same for `phi1_hat`).
    Value,
    /// `| |phi_hat(2n)| - |phi_hat(n)| |`, for callers that only need `|g|`.
    Modulus,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitOptions {
    pub tol: f64,
    pub n_max: usize,
    pub target: Target,
}

impl LimitOptions {
    /// Defaults for a point: `tol = 1e-8` off the real axis, `1e-6` on it.
    pub fn for_point(x: Complex64) -> Self {
        Self {
            tol: if x.im > 0.0 { 1e-8 } else { 1e-6 },
            n_max: 1 << 20,
            target: Target::Value,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }
}

/// One doubling checkpoint.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Checkpoint {
    pub n: usize,
    pub phi_hat: Complex64,
    pub phi1_hat: Complex64,
    /// Difference to the previous checkpoint (`None` at the first).
    pub diff: Option<f64>,
    /// `sum eps(k)` from the previous checkpoint to this one.
    pub eps_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitValue {
    pub x: Complex64,
    pub g: Complex64,
    pub g1: Complex64,
    pub n_used: usize,
    pub tail_estimate: f64,
    pub converged: bool,
    /// Some band argument came within `1e-8` of `+-1`.
    pub low_confidence: bool,
    /// Fitted constant of the tail bound.
    pub tail_constant: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub warnings: Vec<String>,
    /// Recurrence state at `n_used`.
    pub state: ScaledState,
}

/// Warning text when the sequence does not satisfy the hypotheses under
/// which `g` is known to exist.
pub(crate) fn hypothesis_warning(seq: &CoefficientSequence) -> Option<String> {
    let report = seq.hypotheses();
    match report.regime {
        Regime::Unknown | Regime::Excluded => Some(format!(
            "HYPOTHESIS_VIOLATION: regime {:?} (d ~ {}); limit may not exist",
            report.regime, report.d_estimate
        )),
        _ => None,
    }
}

/// Evaluate `g(x)` and `g1(x)` for `x` in the closed upper half plane.
///
/// Never fails for lack of convergence: at `n_max` the best value is
/// returned with `converged = false`.
pub fn eval_g(seq: &CoefficientSequence, x: Complex64, opts: &LimitOptions) -> Result<LimitValue> {
    let x = upper(x);
    if x.im < 0.0 || !x.re.is_finite() || !x.im.is_finite() {
        return Err(Error::InvalidArgument(format!("x = {x} is not in the closed upper half plane")));
    }
    if !(opts.tol > 0.0) || opts.n_max < 2 {
        return Err(Error::InvalidArgument("eval_g needs tol > 0 and n_max >= 2".into()));
    }

    let mut state = ScaledState::init(x);
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    let mut eps_acc = 0.0;
    let mut n_next = 1;
    let mut tail_constant = 0.0;
    let mut tail_estimate = f64::INFINITY;
    let mut converged = false;

    loop {
        while state.n < n_next {
            state.advance(seq)?;
            eps_acc += epsilon(seq, state.n);
        }
        // phi1_hat(1) = 1/a(1) is set by convention, outside the telescoping
        // family, so the second kind only enters from checkpoint 2 on
        let diff = checkpoints.last().map(|prev| {
            let (d, d1) = match opts.target {
                Target::Value => (
                    (state.phi_hat - prev.phi_hat).norm(),
                    (state.phi1_hat - prev.phi1_hat).norm(),
                ),
                Target::Modulus => (
                    (state.phi_hat.norm() - prev.phi_hat.norm()).abs(),
                    (state.phi1_hat.norm() - prev.phi1_hat.norm()).abs(),
                ),
            };
            if prev.n >= 2 { d.max(d1) } else { d }
        });
        checkpoints.push(Checkpoint {
            n: state.n,
            phi_hat: state.phi_hat,
            phi1_hat: state.phi1_hat,
            diff,
            eps_sum: eps_acc,
        });
        eps_acc = 0.0;

        if let Some(d) = diff {
            let fitted: Vec<(f64, f64)> = checkpoints
                .iter()
                .filter_map(|c| c.diff.map(|d| (c.eps_sum, d)))
                .take(3)
                .collect();
            tail_constant = least_squares_origin(&fitted);
            let remainder = power_tail(|i| epsilon(seq, i), state.n).map(|t| t.remainder);
            tail_estimate = match remainder {
                Some(r) => 4.0 * tail_constant * r,
                None => f64::INFINITY,
            };
            if d <= opts.tol / 2.0 && tail_estimate < opts.tol {
                converged = true;
                break;
            }
        }
        if state.n >= opts.n_max {
            break;
        }
        n_next = (2 * state.n).min(opts.n_max);
    }

    let mut warnings = Vec::new();
    warnings.extend(hypothesis_warning(seq));
    if !converged {
        warnings.push(format!(
            "NON_CONVERGED: n_max = {} reached (last difference {:e}, tail estimate {:e})",
            opts.n_max,
            checkpoints.last().and_then(|c| c.diff).unwrap_or(f64::NAN),
            tail_estimate
        ));
    }
    Ok(LimitValue {
        x,
        g: state.phi_hat,
        g1: state.phi1_hat,
        n_used: state.n,
        tail_estimate,
        converged,
        low_confidence: state.min_edge_margin < 1e-8,
        tail_constant,
        checkpoints,
        warnings,
        state,
    })
}

/// Real-analytic continuation of `g` across the real axis for `|d| > 1`:
/// `F = g prod_{i=1}^{m} t1(i)` and `F1 = g1 prod_{i=2}^{m} t1(i)`, with
/// `m >= 1` at least the last index whose band meets the point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RealContinuation {
    pub x: f64,
    pub m: usize,
    pub f: f64,
    pub f1: f64,
    /// `|Im F| / |F|` (and the same for `F1`), zero up to rounding.
    pub imag_residual: f64,
    /// `prod_{i=1}^{m} t1(i)`.
    pub prod_t1: Complex64,
    pub t1_first: Complex64,
}

impl RealContinuation {
    /// `g'` from `F'` at a zero of `F` (where the product's own derivative
    /// drops out).
    pub fn g_prime_at_zero(&self, f_prime: f64) -> Complex64 {
        f_prime / self.prod_t1
    }
}

pub(crate) fn check_discrete(seq: &CoefficientSequence) -> Result<()> {
    let d = seq.hypotheses().d_estimate;
    if d.abs() <= 1.0 {
        return Err(Error::RegimeMismatch {
            expected: Regime::Discrete,
            d,
        });
    }
    Ok(())
}

/// Band-index bound for the real continuation on `[lo, hi]`; fails when
/// bands keep meeting the interval up to `limit`.
pub(crate) fn continuation_index(seq: &CoefficientSequence, lo: f64, hi: f64, limit: usize) -> Result<usize> {
    let k = last_band_index(seq, lo, hi, limit);
    if k > limit / 2 {
        return Err(Error::XInBand {
            x: if lo == hi { lo } else { 0.5 * (lo + hi) },
            last_checked: limit,
        });
    }
    Ok(k.max(1))
}

/// Multiply a limit value by the first `m` transfer factors.
pub(crate) fn continue_real(seq: &CoefficientSequence, x: f64, m: usize, g: Complex64, g1: Complex64) -> RealContinuation {
    let xc = Complex64::new(x, 0.0);
    let t1_first = transfer(seq, 1, xc).t1;
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 1..=m {
        prod *= transfer(seq, i as i64, xc).t1;
    }
    let f = g * prod;
    let f1 = g1 * prod / t1_first;
    let rel = |v: Complex64| if v.norm() > 0.0 { v.im.abs() / v.norm() } else { 0.0 };
    RealContinuation {
        x,
        m,
        f: f.re,
        f1: f1.re,
        imag_residual: rel(f).max(rel(f1)),
        prod_t1: prod,
        t1_first,
    }
}

/// `F` and `F1` at a fixed recurrence depth `n` (no convergence loop), for
/// root finding where every evaluation must use the same approximation.
pub(crate) fn real_continuation_at(seq: &CoefficientSequence, x: f64, m: usize, n: usize) -> Result<RealContinuation> {
    let mut state = ScaledState::init(Complex64::new(x, 0.0));
    state.advance_to(seq, n.max(m + 1))?;
    Ok(continue_real(seq, x, m, state.phi_hat, state.phi1_hat))
}

/// `g` on the real axis in the discrete regime, together with its real
/// continuation. Convergence is judged on the continuation `F`, relative
/// to `max(|F|, 1)`.
pub fn eval_g_real_discrete(
    seq: &CoefficientSequence,
    x: f64,
    opts: &LimitOptions,
) -> Result<(LimitValue, RealContinuation)> {
    check_discrete(seq)?;
    let m = continuation_index(seq, x, x, opts.n_max.max(256))?;
    let value = eval_g(seq, Complex64::new(x, 0.0), opts)?;
    let cont = continue_real(seq, x, m, value.g, value.g1);
    Ok((value, cont))
}
