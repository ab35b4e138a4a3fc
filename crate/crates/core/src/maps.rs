//! The exterior map `rho(z) = z + sqrt(z^2 - 1)` and the per-index transfer
//! scalars built from it.
//!
//! Real arguments are always read as boundary values from the upper half
//! plane, `x + i0+`.

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::CoefficientSequence;

/// Replace a `-0.0` imaginary part by `+0.0` so that principal square roots
/// of real arguments take their upper-half-plane boundary value.
#[inline]
pub fn upper(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

/// Exterior conformal map of `C \ [-1, 1]` onto `|w| > 1`, normalised by
/// `rho(z)/z -> 2`.
///
/// `sqrt(z^2 - 1)` is realised as `sqrt(z - 1) * sqrt(z + 1)` with principal
/// roots, which selects the exterior branch on the whole cut plane. On the
/// cut itself the value is the limit from above. `rho(1) = 1` and
/// `rho(-1) = -1`; values near the endpoints have square-root sensitivity.
#[inline]
pub fn rho(z: Complex64) -> Complex64 {
    let z = upper(z);
    z + (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// `rho(x + i0+)` for real `x`.
#[inline]
pub fn rho_boundary(x: f64) -> Complex64 {
    rho(Complex64::new(x, 0.0))
}

/// Argument of `rho` at index `n`: `(x - b(n)) / (2 sqrt(a(n) a(n+1)))`.
#[inline]
pub fn band_argument(seq: &CoefficientSequence, n: usize, x: Complex64) -> Complex64 {
    upper((upper(x) - seq.b(n)) / (2.0 * (seq.a(n) * seq.a(n + 1)).sqrt()))
}

/// Whether real `x` lies in the band of index `n`, i.e. `|band_argument| <= 1`.
#[inline]
pub fn in_band(seq: &CoefficientSequence, n: usize, x: f64) -> bool {
    band_argument(seq, n, Complex64::new(x, 0.0)).re.abs() <= 1.0
}

/// Transfer scalars at one index and point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferPair {
    pub index: i64,
    /// Argument of `rho` at this index (zero for the unit convention).
    pub z: Complex64,
    pub t1: Complex64,
    pub t2: Complex64,
    pub t1_tilde: Complex64,
    /// Principal argument of `t1`, in `(-pi, pi]`.
    pub arg_t1: f64,
}

impl TransferPair {
    /// The convention `t1 = t2 = 1` used at indices -1 and 0.
    pub fn unit(index: i64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            index,
            z: Complex64::new(0.0, 0.0),
            t1: one,
            t2: one,
            t1_tilde: one,
            arg_t1: 0.0,
        }
    }
}

/// `t1 = sqrt(a(n)/a(n+1)) rho(z_n)` and `t2 = (a(n)/a(n+1)) / t1`.
///
/// `t2` is formed by division; evaluating `z - sqrt(z^2 - 1)` directly
/// cancels badly for large `|z|`.
pub fn transfer(seq: &CoefficientSequence, n: i64, x: Complex64) -> TransferPair {
    if n <= 0 {
        return TransferPair::unit(n);
    }
    let k = n as usize;
    let ratio = seq.a(k) / seq.a(k + 1);
    let z = band_argument(seq, k, x);
    let t1_tilde = rho(z);
    let t1 = ratio.sqrt() * t1_tilde;
    let t2 = ratio / t1;
    TransferPair {
        index: n,
        z,
        t1,
        t2,
        t1_tilde,
        arg_t1: t1.arg(),
    }
}

/// Least `N` such that real `x` lies in the band of every index `n > N`.
///
/// Confirmed by 32 consecutive in-band indices with non-decreasing margin
/// `1 - |z_n|`; `None` if no such run starts at or below `limit`.
pub fn band_cutoff(seq: &CoefficientSequence, x: f64, limit: usize) -> Option<usize> {
    const RUN: usize = 32;
    let mut start = 1;
    let mut prev_margin = f64::NEG_INFINITY;
    let mut n = 1;
    while start <= limit {
        let margin = 1.0 - band_argument(seq, n, Complex64::new(x, 0.0)).re.abs();
        if margin < 0.0 || margin < prev_margin - 1e-15 {
            start = n + 1;
            prev_margin = if margin < 0.0 { f64::NEG_INFINITY } else { margin };
        } else {
            prev_margin = margin;
            if n + 1 - start >= RUN {
                return Some(start - 1);
            }
        }
        n += 1;
    }
    None
}

/// Largest index `k <= limit` whose band `b(k) +- 2 sqrt(a(k) a(k+1))`
/// meets `[lo, hi]`, or 0 if none does.
pub fn last_band_index(seq: &CoefficientSequence, lo: f64, hi: f64, limit: usize) -> usize {
    (1..=limit)
        .rev()
        .find(|&k| {
            let half = 2.0 * (seq.a(k) * seq.a(k + 1)).sqrt();
            let c = seq.b(k);
            c - half <= hi && c + half >= lo
        })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_points_and_simple_values() {
        assert_eq!(rho(c(1.0, 0.0)), c(1.0, 0.0));
        assert_eq!(rho(c(-1.0, 0.0)), c(-1.0, 0.0));
        assert_eq!(rho(c(1.25, 0.0)), c(2.0, 0.0));
        assert_eq!(rho_boundary(0.0), c(0.0, 1.0));
        // a negative zero imaginary part still gives the upper boundary value
        assert_eq!(rho(c(0.0, -0.0)), c(0.0, 1.0));
    }

    #[test]
    fn joukowski_inverse_identity() {
        let z = c(3.0, 2.0);
        let r = rho(z);
        let prod = r * (2.0 * z - r);
        assert!((prod - 1.0).norm() < 1e-13);
    }

    #[test]
    fn real_axis_branches() {
        let r = rho_boundary(-3.0);
        assert!(r.re < -1.0 && r.im == 0.0);
        assert_relative_eq!(r.re, -3.0 - 8f64.sqrt(), max_relative = 1e-15);
        let r = rho_boundary(0.6);
        assert_relative_eq!(r.re, 0.6);
        assert_relative_eq!(r.im, 0.8, max_relative = 1e-15);
    }

    #[test]
    fn large_argument_no_overflow() {
        let r = rho(c(1e200, 1e200));
        assert!(r.re.is_finite() && r.im.is_finite());
        assert_relative_eq!(r.re / 1e200, 2.0, max_relative = 1e-12);
        assert_relative_eq!(r.im / 1e200, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn transfer_conventions_and_examples() {
        let h = CoefficientSequence::hermite();
        let t0 = transfer(&h, 0, c(2.0, 0.0));
        assert_eq!((t0.t1, t0.t2), (c(1.0, 0.0), c(1.0, 0.0)));
        assert_eq!(transfer(&h, -1, c(2.0, 0.0)).t1, c(1.0, 0.0));

        let one = CoefficientSequence::constant(1.0, 0.0).unwrap();
        let t = transfer(&one, 1, c(3.0, 0.0));
        assert_relative_eq!(t.t1.re, 1.5 + 1.25f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(t.t2.re, 1.5 - 1.25f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!((t.t1 * t.t2).re, 1.0, max_relative = 1e-15);

        let t = transfer(&h, 2, c(0.0, 0.0));
        assert_relative_eq!(t.t1.norm(), (2.0f64 / 3.0).powf(0.25), max_relative = 1e-15);
        assert_relative_eq!(t.t1_tilde.norm(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn modulus_ordering() {
        let h = CoefficientSequence::hermite();
        for &(n, x) in &[(1, c(0.3, 0.0)), (5, c(7.0, 0.0)), (9, c(-2.0, 0.5))] {
            let t = transfer(&h, n, x);
            let s = (h.a(n as usize) / h.a(n as usize + 1)).sqrt();
            assert!(t.t1.norm() >= s * (1.0 - 1e-14));
            assert!(t.t2.norm() <= s * (1.0 + 1e-14));
        }
    }

    #[test]
    fn band_geometry() {
        let h = CoefficientSequence::hermite();
        assert_eq!(band_cutoff(&h, 0.0, 100), Some(0));
        // 2 <= sqrt(2) (n(n+1))^(1/4) first holds at n = 2
        assert_eq!(band_cutoff(&h, 2.0, 100), Some(1));
        let d = CoefficientSequence::power_law(1.0, 1.0, 0.0, 4.0, 0.0).unwrap();
        assert_eq!(band_cutoff(&d, 0.0, 1000), None);
        assert_eq!(last_band_index(&d, -1.0, 0.0, 1000), 0);
        // band of k: [4k - 2 sqrt(k(k+1)), 4k + 2 sqrt(k(k+1))]
        assert_eq!(last_band_index(&d, 10.0, 12.0, 1000), 6);
    }
}
