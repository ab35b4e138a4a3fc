//! Large-`n` asymptotics as checkable residuals.
//!
//! Inside the bands (real `x`, `|d| < 1`):
//!
//! ```text
//! sqrt(a(n+1)) sqrt((1 - z(n+1)^2) mu'(x)) p(n)
//!     ~ sqrt(sqrt(1 - z^2) / pi) sin(sum_{k<=n} arg t1(k) + arg g(x))
//! ```
//!
//! with `z(n+1) = (x - b(n+1)) / (2 sqrt(a(n+1) a(n+2)))` and `z` its limit.
//! Off the spectrum, `phi_hat(n) ~ g(x)`. Both errors are of the order of
//! the `eps` tail. The phase sum adds per-index principal arguments.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::{epsilon_tail, CoefficientSequence};
use crate::error::{Error, Result};
use crate::limits::check_discrete;
use crate::maps::{band_argument, band_cutoff, upper};
use crate::measures::{ac_density, check_ac, DensityOptions};
use crate::oracles::truncation_eigenvalues;
use crate::recurrence::ScaledState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticKind {
    Band,
    OffBand,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticReport {
    pub kind: AsymptoticKind,
    pub x: Complex64,
    pub n: usize,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// `sum_{k>n} eps(k)` for the band formula, `sum_{k>=n} eps(k)` off it.
    pub predicted_tail: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticOptions {
    /// Index of the reference run standing in for `n = infinity`; default
    /// `max(64 n, 2^18)`.
    pub n_ref: Option<usize>,
    pub density: DensityOptions,
    /// Real `x` must stay this far (relative to `max(1, |x|)`) from the
    /// computed spectrum for the off-band formula.
    pub margin: f64,
    /// Truncation size used to locate the spectrum.
    pub truncation: usize,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            n_ref: None,
            density: DensityOptions::default(),
            margin: 1e-3,
            truncation: 400,
        }
    }
}

fn reference_index(ns: &[usize], opts: &AsymptoticOptions) -> usize {
    let n_hi = ns.iter().copied().max().unwrap_or(1);
    opts.n_ref.unwrap_or((64 * n_hi).max(1 << 18)).max(n_hi + 2)
}

fn sorted(ns: &[usize]) -> Result<Vec<usize>> {
    let mut v = ns.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() || v[0] == 0 {
        return Err(Error::InvalidArgument("asymptotic checks need indices n >= 1".into()));
    }
    Ok(v)
}

fn tail_after(seq: &CoefficientSequence, from: usize, n_ref: usize) -> Result<f64> {
    Ok(epsilon_tail(seq, from, n_ref.max(from))?.total())
}

/// `p(n)` at real `x` in real arithmetic, with a separate power-of-two
/// exponent so that the pre-band growth cannot overflow.
struct RealPolys<'a> {
    seq: &'a CoefficientSequence,
    x: f64,
    n: usize,
    cur: f64,
    prev: f64,
    exp2: i32,
}

impl<'a> RealPolys<'a> {
    fn new(seq: &'a CoefficientSequence, x: f64) -> Self {
        Self { seq, x, n: 0, cur: 1.0, prev: 0.0, exp2: 0 }
    }

    fn advance_to(&mut self, target: usize) {
        let s = self.seq;
        while self.n < target {
            let n = self.n;
            let next = if n == 0 {
                (self.x - s.b(0)) / s.a(1)
            } else {
                ((self.x - s.b(n)) * self.cur - s.a(n) * self.prev) / s.a(n + 1)
            };
            self.prev = self.cur;
            self.cur = next;
            self.n += 1;
            if self.cur.abs() > 1e100 {
                self.cur *= 2f64.powi(-332);
                self.prev *= 2f64.powi(-332);
                self.exp2 += 332;
            }
        }
    }

    fn value(&self) -> f64 {
        self.cur * 2f64.powi(self.exp2)
    }
}

/// Band asymptotic at real `x` for each `n` in `ns`.
pub fn check_band_asymptotic_series(
    seq: &CoefficientSequence,
    x: f64,
    ns: &[usize],
    opts: &AsymptoticOptions,
) -> Result<Vec<AsymptoticReport>> {
    check_ac(seq)?;
    let ns = sorted(ns)?;
    let n_ref = reference_index(&ns, opts);
    let cutoff = band_cutoff(seq, x, n_ref).ok_or(Error::XOutsideBand {
        x,
        n: ns[0],
        cutoff: n_ref,
    })?;
    if ns[0] <= cutoff {
        return Err(Error::XOutsideBand { x, n: ns[0], cutoff });
    }

    let density = ac_density(seq, x, &opts.density)?.density;
    let z_inf = band_argument(seq, n_ref, Complex64::new(x, 0.0)).re;
    let amplitude = ((1.0 - z_inf * z_inf).max(0.0).sqrt() / std::f64::consts::PI).sqrt();

    let mut state = ScaledState::init(Complex64::new(x, 0.0));
    let mut real = RealPolys::new(seq, x);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        state.advance_to(seq, n)?;
        real.advance_to(n);
        let z = band_argument(seq, n + 1, Complex64::new(x, 0.0)).re;
        let lhs = seq.a(n + 1).sqrt() * ((1.0 - z * z).max(0.0) * density).sqrt() * real.value();
        rows.push((n, Complex64::new(lhs, 0.0), state.phase));
    }
    state.advance_to(seq, n_ref)?;
    let arg_g = state.phi_hat.arg();

    rows.into_iter()
        .map(|(n, lhs, phase)| {
            let rhs = Complex64::new(amplitude * (phase + arg_g).sin(), 0.0);
            Ok(AsymptoticReport {
                kind: AsymptoticKind::Band,
                x: Complex64::new(x, 0.0),
                n,
                lhs,
                rhs,
                residual: (lhs - rhs).norm(),
                predicted_tail: tail_after(seq, n + 1, n_ref)?,
            })
        })
        .collect()
}

pub fn check_band_asymptotic(
    seq: &CoefficientSequence,
    x: f64,
    n: usize,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticReport> {
    Ok(check_band_asymptotic_series(seq, x, &[n], opts)?[0])
}

/// `|phi_hat(n) - g(x)|` for each `n` in `ns`, with `x` in the open upper
/// half plane or, for `|d| > 1`, real and away from the spectrum.
pub fn check_offband_asymptotic_series(
    seq: &CoefficientSequence,
    x: Complex64,
    ns: &[usize],
    opts: &AsymptoticOptions,
) -> Result<Vec<AsymptoticReport>> {
    let x = upper(x);
    if x.im < 0.0 {
        return Err(Error::InvalidArgument(format!("x = {x} is below the real axis")));
    }
    if x.im == 0.0 {
        let margin = opts.margin * x.re.abs().max(1.0);
        if check_discrete(seq).is_err() {
            // for |d| < 1 the spectrum is the whole line
            return Err(Error::XTooCloseToSpectrum {
                x: x.re,
                distance: 0.0,
                margin,
            });
        }
        let distance = truncation_eigenvalues(seq, opts.truncation)?
            .iter()
            .map(|&e| (e - x.re).abs())
            .fold(f64::INFINITY, f64::min);
        if distance <= margin {
            return Err(Error::XTooCloseToSpectrum {
                x: x.re,
                distance,
                margin,
            });
        }
    }
    let ns = sorted(ns)?;
    let n_ref = reference_index(&ns, opts);
    let mut state = ScaledState::init(x);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        state.advance_to(seq, n)?;
        rows.push((n, state.phi_hat));
    }
    state.advance_to(seq, n_ref)?;
    let g = state.phi_hat;
    rows.into_iter()
        .map(|(n, phi)| {
            Ok(AsymptoticReport {
                kind: AsymptoticKind::OffBand,
                x,
                n,
                lhs: phi,
                rhs: g,
                residual: (phi - g).norm(),
                predicted_tail: tail_after(seq, n, n_ref)?,
            })
        })
        .collect()
}

pub fn check_offband_asymptotic(
    seq: &CoefficientSequence,
    x: Complex64,
    n: usize,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticReport> {
    Ok(check_offband_asymptotic_series(seq, x, &[n], opts)?[0])
}

/// `residual(n_{j+1}) / residual(n_j)` over consecutive reports.
pub fn decay_ratios(reports: &[AsymptoticReport]) -> Vec<f64> {
    reports.windows(2).map(|w| w[1].residual / w[0].residual).collect()
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|r| r.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[AsymptoticReport]) -> Result<String> {
    let mut out = String::new();
    for r in reports {
        writeln!(out, "{}", serde_json::to_string(r)?).unwrap();
    }
    Ok(out)
}

/// `2^lo, ..., 2^hi`.
pub fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}
