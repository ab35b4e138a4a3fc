//! Forward iteration of the orthonormal polynomials, the second-kind
//! polynomials and the product-normalised functions
//!
//! ```text
//! phi_hat(n)  = (p(n)  - t2(n) p(n-1))  / prod_{i=1}^{n-1} t1(i)
//! phi1_hat(n) = (p1(n) - t2(n) p1(n-1)) / prod_{i=2}^{n-1} t1(i)
//! ```
//!
//! The state never holds `p(n)` itself. It holds `p_hat(n) = p(n) / prod_{i=1}^{n} t1(i)`
//! (and `p1(n) / prod_{i=2}^{n} t1(i)` for the second kind), which stays
//! O(1) wherever the recurrence is dominated by its `t1` solution. The
//! removed product is tracked as `log_scale + i * phase`.
//!
//! `phi_hat` advances by the telescoping difference
//! `phi_hat(n+1) = phi_hat(n) + (t2(n) - t2(n+1)) p_hat(n)`, valid from
//! `n = 1` on; the second-kind version is valid from `n = 2` on. The first
//! values are set directly.

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::CoefficientSequence;
use crate::error::{Error, Result};
use crate::maps::{transfer, upper, TransferPair};

const MANTISSA_LO: f64 = 1e-8;
const MANTISSA_HI: f64 = 1e8;

/// Normalised recurrence state at one index.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScaledState {
    pub n: usize,
    pub x: Complex64,
    /// `p(n) / prod_{i=1}^{n} t1(i)`
    pub p_cur: Complex64,
    /// `p(n-1) / prod_{i=1}^{n-1} t1(i)`
    pub p_prev: Complex64,
    /// `p1(n) / prod_{i=2}^{n} t1(i)`
    pub p1_cur: Complex64,
    pub p1_prev: Complex64,
    pub phi_hat: Complex64,
    pub phi1_hat: Complex64,
    /// Sum of principal arguments of `t1(k)`, `k = 1..=n`.
    pub phase: f64,
    /// Transfer scalars at index `n`.
    pub transfer: TransferPair,
    /// `t1(1)`, needed to move between the two product normalisations.
    pub t1_first: Complex64,
    /// Smallest `| |z_k| - 1 |` seen so far on the real axis (infinite off it).
    pub min_edge_margin: f64,
    log_exponent: f64,
    log_mantissa: f64,
}

impl ScaledState {
    /// State at `n = 0`: `p(0) = 1`, `p(-1) = 0`, `p1(0) = 0`.
    pub fn init(x: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            n: 0,
            x: upper(x),
            p_cur: one,
            p_prev: zero,
            p1_cur: zero,
            p1_prev: zero,
            phi_hat: one,
            phi1_hat: zero,
            phase: 0.0,
            transfer: TransferPair::unit(0),
            t1_first: one,
            min_edge_margin: f64::INFINITY,
            log_exponent: 0.0,
            log_mantissa: 1.0,
        }
    }

    /// `log |prod_{i=1}^{n} t1(i)|`.
    pub fn log_scale(&self) -> f64 {
        self.log_exponent + self.log_mantissa.ln()
    }

    /// Complex logarithm of `prod_{i=1}^{n} t1(i)` (argument not reduced).
    pub fn log_product(&self) -> Complex64 {
        Complex64::new(self.log_scale(), self.phase)
    }

    /// Complex logarithm of `p(n)`; `-inf` real part when `p(n) = 0`.
    pub fn log_p(&self) -> Complex64 {
        self.p_cur.ln() + self.log_product()
    }

    /// `p(n)` reconstructed from the scaled state. Overflows for large
    /// products; use [`ScaledState::log_p`] there.
    pub fn p(&self) -> Complex64 {
        if self.p_cur == Complex64::new(0.0, 0.0) {
            return self.p_cur;
        }
        self.log_p().exp()
    }

    /// `p1(n)` reconstructed, using `prod_{i=2}^{n} = prod_{i=1}^{n} / t1(1)`.
    pub fn p1(&self) -> Complex64 {
        if self.p1_cur == Complex64::new(0.0, 0.0) || self.n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        (self.p1_cur.ln() + self.log_product() - self.t1_first.ln()).exp()
    }

    /// `a(n) (p(n) p1(n-1) - p(n-1) p1(n))`, which is `-1` for every `n >= 1`.
    pub fn wronskian(&self, seq: &CoefficientSequence) -> Complex64 {
        match self.n {
            0 => Complex64::new(0.0, 0.0),
            1 => -seq.a(1) * self.p1_cur,
            n => {
                // both products reduce to prod_{1}^{n} prod_{1}^{n-1} / t1(1)
                let s = self.p_cur * self.p1_prev - self.p_prev * self.p1_cur;
                if s == Complex64::new(0.0, 0.0) {
                    return s;
                }
                let log = s.ln() + 2.0 * self.log_product()
                    + (seq.a(n) / (self.transfer.t1 * self.t1_first)).ln();
                log.exp()
            }
        }
    }

    /// Advance to `n + 1` in place.
    pub fn advance(&mut self, seq: &CoefficientSequence) -> Result<()> {
        let n = self.n;
        let x = self.x;
        let next = transfer(seq, n as i64 + 1, x);
        let lead = (x - seq.b(n)) / seq.a(n + 1);

        let (p_next, p1_next, phi_next, phi1_next);
        if n == 0 {
            p_next = lead / next.t1;
            p1_next = Complex64::new(1.0 / seq.a(1), 0.0);
            phi_next = lead - next.t2;
            phi1_next = p1_next;
        } else {
            let back = seq.a(n) / seq.a(n + 1);
            p_next = (lead * self.p_cur - back * self.p_prev / self.transfer.t1) / next.t1;
            // p1 uses prod from i = 2, so the n = 1 step has no t1(1) factor
            let p1_back = if n == 1 {
                back * self.p1_prev
            } else {
                back * self.p1_prev / self.transfer.t1
            };
            p1_next = (lead * self.p1_cur - p1_back) / next.t1;
            let dt2 = self.transfer.t2 - next.t2;
            phi_next = self.phi_hat + dt2 * self.p_cur;
            phi1_next = if n == 1 {
                p1_next * next.t1 - next.t2 * self.p1_cur
            } else {
                self.phi1_hat + dt2 * self.p1_cur
            };
        }

        let magnitude = p_next.norm().max(self.p_cur.norm());
        if !(1e-300..=1e300).contains(&magnitude) {
            return Err(Error::ScaleOutOfRange {
                n: n + 1,
                magnitude,
            });
        }

        self.p_prev = self.p_cur;
        self.p_cur = p_next;
        self.p1_prev = self.p1_cur;
        self.p1_cur = p1_next;
        self.phi_hat = phi_next;
        self.phi1_hat = phi1_next;
        self.phase += next.arg_t1;
        self.log_mantissa *= next.t1.norm();
        if !(MANTISSA_LO..=MANTISSA_HI).contains(&self.log_mantissa) {
            self.log_exponent += self.log_mantissa.ln();
            self.log_mantissa = 1.0;
        }
        if x.im == 0.0 {
            self.min_edge_margin = self.min_edge_margin.min((next.z.re.abs() - 1.0).abs());
        }
        if n == 0 {
            self.t1_first = next.t1;
        }
        self.transfer = next;
        self.n = n + 1;
        Ok(())
    }

    /// Advance until `n == target`.
    pub fn advance_to(&mut self, seq: &CoefficientSequence, target: usize) -> Result<()> {
        while self.n < target {
            self.advance(seq)?;
        }
        Ok(())
    }
}

pub fn init(x: Complex64) -> ScaledState {
    ScaledState::init(x)
}

pub fn step(state: ScaledState, seq: &CoefficientSequence) -> Result<ScaledState> {
    let mut s = state;
    s.advance(seq)?;
    Ok(s)
}

/// Run to `n_max`, keeping snapshots at the requested indices (in increasing
/// order; indices above `n_max` are ignored).
pub fn run(
    seq: &CoefficientSequence,
    x: Complex64,
    n_max: usize,
    checkpoints: &[usize],
) -> Result<Vec<ScaledState>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("run needs n_max >= 1".into()));
    }
    let mut marks: Vec<usize> = checkpoints.iter().copied().filter(|&c| c <= n_max).collect();
    marks.sort_unstable();
    marks.dedup();
    let mut state = ScaledState::init(x);
    let mut out = Vec::with_capacity(marks.len());
    for m in marks {
        state.advance_to(seq, m)?;
        out.push(state);
    }
    Ok(out)
}

/// `1, 2, 4, ...` up to `n_max`, with `n_max` itself appended.
pub fn doubling_checkpoints(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1;
    while n < n_max {
        out.push(n);
        n *= 2;
    }
    out.push(n_max);
    out
}
