//! Building the spectral measure: absolutely continuous density when
//! `|d| < 1`, point spectrum and masses when `|d| > 1`, the measures of
//! frozen-coefficient systems, and moments of truncated Jacobi matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{CoefficientSequence, Regime};
use crate::error::{Error, Result};
use crate::limits::{check_discrete, continuation_index, hypothesis_warning, real_continuation_at, RealContinuation};
use crate::maps::{band_cutoff, rho};
use crate::oracles::{gershgorin_bound, truncation_eigenvalues, truncation_moments};
use crate::recurrence::ScaledState;
use crate::spectral::{MeasureKind, SpectralMeasure};

// ---------------------------------------------------------------------------
// absolutely continuous part

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DensityOptions {
    /// Relative tolerance between successive estimates; 0 runs to `n_max`.
    pub tol: f64,
    pub n_max: usize,
    /// Extrapolate the `O(1/n)` error away between checkpoints.
    pub richardson: bool,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            n_max: 1 << 17,
            richardson: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityValue {
    pub x: f64,
    pub density: f64,
    /// Least `N` with `x` inside the band of every index above `N`.
    pub cutoff: usize,
    pub n_used: usize,
    pub converged: bool,
    /// `phi_hat(n_used)`, the running approximation of `g(x + i0)`.
    pub g: Complex64,
    pub warnings: Vec<String>,
}

/// `sqrt(1 - z_n^2) / (pi a(n) |phi_n|^2)` from the scaled state.
///
/// Past the cutoff this equals
/// `(1/(a(1) pi)) sqrt(1 - z_n^2) / (|phi_hat(n)|^2 prod_{k<n} |t1~(k)|^2)`,
/// which tends to the density as `n` grows.
fn density_at(seq: &CoefficientSequence, s: &ScaledState) -> f64 {
    let z = s.transfer.z.re;
    let log_phi = s.phi_hat.norm().ln() + s.log_scale() - s.transfer.t1.norm().ln();
    (1.0 - z * z).max(0.0).sqrt() / (PI * seq.a(s.n)) * (-2.0 * log_phi).exp()
}

pub(crate) fn check_ac(seq: &CoefficientSequence) -> Result<()> {
    let d = seq.hypotheses().d_estimate;
    if d.abs() >= 1.0 {
        return Err(Error::RegimeMismatch {
            expected: Regime::Ac,
            d,
        });
    }
    Ok(())
}

/// Density of the measure at real `x` for a sequence with `|d| < 1`.
pub fn ac_density(seq: &CoefficientSequence, x: f64, opts: &DensityOptions) -> Result<DensityValue> {
    check_ac(seq)?;
    if !x.is_finite() || !(opts.tol >= 0.0) || opts.n_max < 2 {
        return Err(Error::InvalidArgument("ac_density needs finite x, tol >= 0 and n_max >= 2".into()));
    }
    let cutoff = band_cutoff(seq, x, opts.n_max).ok_or(Error::XOutsideBand {
        x,
        n: opts.n_max,
        cutoff: opts.n_max,
    })?;

    let mut marks = Vec::new();
    let mut n = (cutoff + 1).next_power_of_two().max(16);
    while n < opts.n_max {
        marks.push(n);
        n *= 2;
    }
    marks.push(opts.n_max);

    let mut state = ScaledState::init(Complex64::new(x, 0.0));
    let mut prev: Option<(usize, f64)> = None;
    let mut prev_estimate: Option<f64> = None;
    let mut estimate = f64::NAN;
    let mut converged = false;
    let mut agreed = false;
    for &m in &marks {
        state.advance_to(seq, m)?;
        let d = density_at(seq, &state);
        let current = match (opts.richardson, prev) {
            (true, Some((n1, d1))) => {
                let (n1, n2) = (n1 as f64, m as f64);
                ((n2 * d - n1 * d1) / (n2 - n1)).max(0.0)
            }
            (true, None) => {
                prev = Some((m, d));
                estimate = d;
                continue;
            }
            (false, _) => d,
        };
        prev = Some((m, d));
        // the extrapolated error still carries a small oscillating part, so
        // one agreement can be a coincidence: require two in a row
        let close = prev_estimate.map_or(false, |p: f64| (current - p).abs() <= opts.tol * current.abs());
        estimate = current;
        if close && agreed {
            converged = true;
            break;
        }
        agreed = close;
        prev_estimate = Some(current);
    }

    let mut warnings: Vec<String> = hypothesis_warning(seq).into_iter().collect();
    if !converged {
        warnings.push(format!("NON_CONVERGED: density at x = {x} not settled by n_max = {}", opts.n_max));
    }
    Ok(DensityValue {
        x,
        density: estimate,
        cutoff,
        n_used: state.n,
        converged,
        g: state.phi_hat,
        warnings,
    })
}

/// Density on a grid, evaluated in parallel and assembled in grid order.
pub fn ac_measure(
    seq: &CoefficientSequence,
    grid: &[f64],
    opts: &DensityOptions,
) -> Result<(SpectralMeasure, Vec<DensityValue>)> {
    let values: Vec<DensityValue> = grid
        .par_iter()
        .map(|&x| ac_density(seq, x, opts))
        .collect::<Result<_>>()?;
    let mut m = SpectralMeasure::new(MeasureKind::Ac)
        .with_provenance("sequence", seq.label())
        .with_provenance("tol", opts.tol)
        .with_provenance("n_max", opts.n_max)
        .with_provenance("richardson", opts.richardson)
        .with_provenance("n_used_min", values.iter().map(|v| v.n_used).min().unwrap_or(0))
        .with_provenance("n_used_max", values.iter().map(|v| v.n_used).max().unwrap_or(0))
        .with_provenance("all_converged", values.iter().all(|v| v.converged));
    m.ac_samples = values.iter().map(|v| (v.x, v.density)).collect();
    Ok((m, values))
}

/// Uniform grid `lo, lo + step, ..., hi` (the end point is included when it
/// falls on the grid up to rounding).
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad grid {lo}:{hi}:{step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

// ---------------------------------------------------------------------------
// discrete part

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscreteOptions {
    /// Bisection stops at width `tol * max(1, |x|)`.
    pub tol: f64,
    /// Recurrence depth for every evaluation of the continuation.
    pub depth: usize,
    /// Size of the truncated matrix whose eigenvalues seed the search.
    pub truncation: usize,
    /// Sub-intervals per seed bracket scanned for sign changes.
    pub subdivisions: usize,
}

impl Default for DiscreteOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            depth: 4096,
            truncation: 2000,
            subdivisions: 4,
        }
    }
}

/// One point of the spectrum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralPoint {
    pub x: f64,
    pub mass: f64,
    /// `|g'(x)|`.
    pub g_prime: f64,
    /// Continuation index used on the bracket.
    pub m: usize,
}

fn continuation(seq: &CoefficientSequence, x: f64, m: usize, opts: &DiscreteOptions) -> Result<RealContinuation> {
    real_continuation_at(seq, x, m, opts.depth)
}

/// Zeros of `g` in `[lo, hi]` and their masses `g1 / (t1(1) g')`, for
/// `|d| > 1`.
///
/// The search is seeded by truncated-matrix eigenvalues: brackets are cut
/// at midpoints between consecutive seeds, each bracket is scanned for sign
/// changes of the real continuation and every sign change is bisected.
pub fn discrete_spectrum(
    seq: &CoefficientSequence,
    lo: f64,
    hi: f64,
    opts: &DiscreteOptions,
) -> Result<Vec<SpectralPoint>> {
    check_discrete(seq)?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad search interval [{lo}, {hi}]")));
    }
    let seeds: Vec<f64> = truncation_eigenvalues(seq, opts.truncation)?
        .into_iter()
        .filter(|&s| s > lo && s < hi)
        .collect();
    let mut cuts = vec![lo];
    cuts.extend(seeds.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cuts.push(hi);

    let limit = opts.depth.max(256);
    let mut points = Vec::new();
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let m = continuation_index(seq, u, v, limit)?;
        let sub = opts.subdivisions.max(1);
        let xs: Vec<f64> = (0..=sub).map(|i| u + (v - u) * i as f64 / sub as f64).collect();
        let fs: Vec<f64> = xs
            .iter()
            .map(|&x| continuation(seq, x, m, opts).map(|c| c.f))
            .collect::<Result<_>>()?;
        for i in 0..sub {
            let (mut a, mut b, mut fa) = (xs[i], xs[i + 1], fs[i]);
            let fb = fs[i + 1];
            if fa == 0.0 && i > 0 {
                continue; // counted as the right end of the previous piece
            }
            if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
                continue;
            }
            if fa != 0.0 && fb != 0.0 {
                for _ in 0..200 {
                    if b - a <= opts.tol * a.abs().max(b.abs()).max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    let fm = continuation(seq, mid, m, opts)?.f;
                    if fm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
            } else if fb == 0.0 {
                a = b;
            }
            let x = 0.5 * (a + b);
            points.push(mass_at(seq, x, m, opts)?);
        }
    }
    points.sort_by(|p, q| p.x.total_cmp(&q.x));
    points.dedup_by(|p, q| (p.x - q.x).abs() <= 1e-12 * p.x.abs().max(1.0));
    Ok(points)
}

fn mass_at(seq: &CoefficientSequence, x: f64, m: usize, opts: &DiscreteOptions) -> Result<SpectralPoint> {
    let h = (1e-6 * x.abs()).max(1e-6);
    let fp = continuation(seq, x + h, m, opts)?.f;
    let fm = continuation(seq, x - h, m, opts)?.f;
    let at = continuation(seq, x, m, opts)?;
    let f_prime = (fp - fm) / (2.0 * h);
    let g_prime = at.g_prime_at_zero(f_prime).norm();
    if g_prime < 1e-8 {
        return Err(Error::DoubleRootSuspected { x, derivative: g_prime });
    }
    let mass = at.f1 / f_prime;
    if !(mass > 0.0) {
        return Err(Error::NegativeMass { x, mass });
    }
    Ok(SpectralPoint { x, mass, g_prime, m })
}

/// [`discrete_spectrum`] packed as a measure.
pub fn discrete_measure(seq: &CoefficientSequence, lo: f64, hi: f64, opts: &DiscreteOptions) -> Result<SpectralMeasure> {
    let pts = discrete_spectrum(seq, lo, hi, opts)?;
    let mut m = SpectralMeasure::new(MeasureKind::Discrete)
        .with_provenance("sequence", seq.label())
        .with_provenance("interval", vec![lo, hi])
        .with_provenance("tol", opts.tol)
        .with_provenance("depth", opts.depth)
        .with_provenance("truncation", opts.truncation);
    m.points = pts.iter().map(|p| (p.x, p.mass)).collect();
    Ok(m)
}

/// Default search interval: from below the lowest truncation eigenvalue to
/// the midpoint between eigenvalues `count - 1` and `count`.
pub fn seeded_interval(seq: &CoefficientSequence, count: usize, truncation: usize) -> Result<(f64, f64)> {
    let eig = truncation_eigenvalues(seq, truncation.max(count + 1))?;
    let spread = (eig[count] - eig[0]).abs().max(1.0);
    Ok((eig[0] - 0.1 * spread, 0.5 * (eig[count - 1] + eig[count])))
}

// ---------------------------------------------------------------------------
// frozen systems

/// The system whose coefficients are held at their `n0` values from `n0`
/// on. Its measure has density
/// `sqrt(4a^2 - (x-b)^2) / (2 |phi(x)|^2 a^2 pi)` on `[b - 2a, b + 2a]`,
/// `a = a(n0)`, `b = b(n0)`, `phi = p(n0) - rho((x-b)/(2a))^-1 p(n0-1)`,
/// plus point masses at the real zeros of `phi` off the band.
#[derive(Clone, Debug)]
pub struct FrozenSystem {
    seq: CoefficientSequence,
    n0: usize,
    a: f64,
    b: f64,
}

/// Values at one real point off the band.
#[derive(Clone, Copy, Debug)]
struct FrozenReal {
    phi: f64,
    phi1: f64,
    phi_prime: f64,
}

impl FrozenSystem {
    pub fn new(seq: &CoefficientSequence, n0: usize) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidArgument("frozen index n0 must be >= 1".into()));
        }
        Ok(Self {
            seq: seq.clone(),
            n0,
            a: seq.a(n0),
            b: seq.b(n0),
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn band(&self) -> (f64, f64) {
        (self.b - 2.0 * self.a, self.b + 2.0 * self.a)
    }

    /// `p(n0-1), p(n0), p1(n0-1), p1(n0)` and the derivatives of the first
    /// two.
    fn polys(&self, x: Complex64) -> [Complex64; 6] {
        let s = &self.seq;
        let zero = Complex64::new(0.0, 0.0);
        let (mut p0, mut p1) = (Complex64::new(1.0, 0.0), (x - s.b(0)) / s.a(1));
        let (mut d0, mut d1) = (zero, Complex64::new(1.0 / s.a(1), 0.0));
        let (mut q0, mut q1) = (zero, Complex64::new(1.0 / s.a(1), 0.0));
        for k in 1..self.n0 {
            let (ak, ak1, bk) = (s.a(k), s.a(k + 1), s.b(k));
            let p2 = ((x - bk) * p1 - ak * p0) / ak1;
            let d2 = ((x - bk) * d1 + p1 - ak * d0) / ak1;
            let q2 = ((x - bk) * q1 - ak * q0) / ak1;
            (p0, p1, d0, d1, q0, q1) = (p1, p2, d1, d2, q1, q2);
        }
        [p0, p1, q0, q1, d0, d1]
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.b) / (2.0 * self.a)
    }

    /// `phi` and its second-kind analogue at a point of the closed upper
    /// half plane (boundary values on the band).
    pub fn phi(&self, x: Complex64) -> (Complex64, Complex64) {
        let [p0, p1, q0, q1, ..] = self.polys(x);
        let inv = 1.0 / rho((x - self.b) / (2.0 * self.a));
        (p1 - inv * p0, q1 - inv * q0)
    }

    fn real_values(&self, x: f64) -> FrozenReal {
        let xc = Complex64::new(x, 0.0);
        let [p0, p1, q0, q1, d0, d1] = self.polys(xc);
        let z = Complex64::new(self.z(x), 0.0);
        let r = rho(z);
        let s = r - z;
        let inv = 1.0 / r;
        // d(1/rho)/dx = -1 / (rho sqrt(z^2 - 1)) * dz/dx
        let dinv = -1.0 / (r * s) / (2.0 * self.a);
        FrozenReal {
            phi: (p1 - inv * p0).re,
            phi1: (q1 - inv * q0).re,
            phi_prime: (d1 - inv * d0 - dinv * p0).re,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let z = self.z(x);
        if z.abs() >= 1.0 {
            return 0.0;
        }
        let (phi, _) = self.phi(Complex64::new(x, 0.0));
        (1.0 - z * z).sqrt() / (self.a * PI * phi.norm_sqr())
    }

    /// Point masses off the band, from sign changes of `phi` on a grid that
    /// includes truncation eigenvalues of the frozen matrix as extra nodes.
    pub fn point_masses(&self) -> Result<Vec<(f64, f64)>> {
        let (lo, hi) = self.band();
        let frozen = self.seq.frozen(self.n0)?;
        let size = self.n0 + 200;
        let radius = gershgorin_bound(&frozen, size) + 1.0;
        let seeds = truncation_eigenvalues(&frozen, size)?;
        let gap = 1e-9 * self.a.max(1.0);
        let mut out = Vec::new();
        for (from, to) in [(-radius + self.b.min(0.0), lo - gap), (hi + gap, radius + self.b.max(0.0))] {
            if !(from < to) {
                continue;
            }
            let mut xs: Vec<f64> = (0..=2000).map(|i| from + (to - from) * i as f64 / 2000.0).collect();
            xs.extend(seeds.iter().copied().filter(|&s| s > from && s < to));
            xs.sort_by(f64::total_cmp);
            let fs: Vec<f64> = xs.iter().map(|&x| self.real_values(x).phi).collect();
            for i in 0..xs.len() - 1 {
                let (mut a, mut b, mut fa) = (xs[i], xs[i + 1], fs[i]);
                if fa == 0.0 || fa.signum() == fs[i + 1].signum() {
                    if fa == 0.0 {
                        out.push(self.mass_at(a)?);
                    }
                    continue;
                }
                for _ in 0..200 {
                    if b - a <= 1e-15 * a.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (a + b);
                    let fm = self.real_values(mid).phi;
                    if fm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                out.push(self.mass_at(0.5 * (a + b))?);
            }
        }
        Ok(out)
    }

    fn mass_at(&self, x: f64) -> Result<(f64, f64)> {
        let v = self.real_values(x);
        if v.phi_prime.abs() < 1e-8 {
            return Err(Error::DoubleRootSuspected {
                x,
                derivative: v.phi_prime.abs(),
            });
        }
        let mass = v.phi1 / v.phi_prime;
        if !(mass > 0.0) {
            return Err(Error::NegativeMass { x, mass });
        }
        Ok((x, mass))
    }

    /// Midpoint rule in `theta` for `x = b + 2a cos(theta)`: nodes ascending
    /// in `x`, weights `2 sin^2(theta) / (pi |phi|^2) * pi / count`.
    pub fn ac_rule(&self, count: usize) -> Vec<(f64, f64)> {
        (0..count)
            .rev()
            .map(|j| {
                let theta = (j as f64 + 0.5) * PI / count as f64;
                let x = self.b + 2.0 * self.a * theta.cos();
                let (phi, _) = self.phi(Complex64::new(x, 0.0));
                (x, 2.0 * theta.sin().powi(2) / (PI * phi.norm_sqr()) * PI / count as f64)
            })
            .collect()
    }

    /// Moments `int x^k dmu` for `k = 0..=k_max` and the absolute moments
    /// `int |x|^k dmu`.
    pub fn moments(&self, k_max: usize, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut all = self.ac_rule(nodes);
        all.extend(self.point_masses()?);
        let mut m = vec![0.0; k_max + 1];
        let mut abs = vec![0.0; k_max + 1];
        for &(x, w) in &all {
            let mut xp = w;
            for k in 0..=k_max {
                m[k] += xp;
                abs[k] += xp.abs();
                xp *= x;
            }
        }
        Ok((m, abs))
    }

    pub fn measure(&self, grid: &[f64]) -> Result<SpectralMeasure> {
        let mut m = SpectralMeasure::new(MeasureKind::Frozen)
            .with_provenance("sequence", self.seq.label())
            .with_provenance("n0", self.n0)
            .with_provenance("a", self.a)
            .with_provenance("b", self.b);
        m.ac_samples = grid.iter().map(|&x| (x, self.density(x))).collect();
        m.points = self.point_masses()?;
        m.frozen_band = Some(self.band());
        m.ac_rule = Some(self.ac_rule(FROZEN_RULE_NODES));
        Ok(m)
    }
}

/// Nodes of the exact rule attached to frozen measures.
pub const FROZEN_RULE_NODES: usize = 1024;

pub fn frozen_measure(seq: &CoefficientSequence, n0: usize, grid: &[f64]) -> Result<SpectralMeasure> {
    FrozenSystem::new(seq, n0)?.measure(grid)
}

// ---------------------------------------------------------------------------
// moments

/// `(J^k)_00` of the `n x n` truncation; needs `n > k/2 + 1`.
pub fn moments_jacobi(seq: &CoefficientSequence, k: usize, n: usize) -> Result<f64> {
    if (n as f64) <= k as f64 / 2.0 + 1.0 {
        return Err(Error::TruncationTooSmall { n, k });
    }
    Ok(truncation_moments(seq, k, n, 1.0)[k])
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakConvergenceRow {
    pub n0: usize,
    pub k_max: usize,
    /// `|s_k(frozen) - s_k| / int |x|^k dmu_frozen` for `k = 0..=k_max`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakConvergenceReport {
    pub rows: Vec<WeakConvergenceRow>,
    pub max_deviation: f64,
}

/// Compare moments of each frozen measure with the Jacobi-matrix moments
/// for `k <= min(2 n0, k_max)`.
pub fn weak_convergence_check(seq: &CoefficientSequence, n0_list: &[usize], k_max: usize) -> Result<WeakConvergenceReport> {
    let mut rows = Vec::new();
    for &n0 in n0_list {
        let k_used = k_max.min(2 * n0);
        let (frozen, abs) = FrozenSystem::new(seq, n0)?.moments(k_used, 512)?;
        let exact = truncation_moments(seq, k_used, k_used + 2, 1.0);
        let deviations: Vec<f64> = (0..=k_used)
            .map(|k| (frozen[k] - exact[k]).abs() / abs[k].max(f64::MIN_POSITIVE))
            .collect();
        let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
        rows.push(WeakConvergenceRow {
            n0,
            k_max: k_used,
            deviations,
            max_deviation,
        });
    }
    let max_deviation = rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    Ok(WeakConvergenceReport { rows, max_deviation })
}
