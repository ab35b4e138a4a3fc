//! Independent checks: tridiagonal eigenvalues, Gauss rules, closed-form
//! weights and orthonormality integrals.
//!
//! Nothing here uses the limit functions. Truncated Jacobi matrices and
//! their eigen-decompositions are standard linear algebra, so agreement
//! with the measure builders is a real cross-check.

use std::fmt::Write as _;

use serde::Serialize;

use crate::coeffs::CoefficientSequence;
use crate::error::{Error, Result};
use crate::spectral::SpectralMeasure;

const MAX_QL_ITER: usize = 60;

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal, with the squared first components of
/// the normalised eigenvectors.
///
/// Implicit-shift QL; only the first row of the eigenvector matrix is
/// accumulated, so the cost is `O(n^2)`.
pub fn tridiag_eigs(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::InvalidArgument(format!(
            "tridiagonal matrix of size {n} needs {} off-diagonal entries, got {}",
            n - 1,
            offdiag.len()
        )));
    }
    if let Some(v) = offdiag.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(format!("off-diagonal entry {v} is not positive")));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(Error::EigenNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    Ok((order.iter().map(|&i| d[i]).collect(), order.iter().map(|&i| z[i] * z[i]).collect()))
}

/// Diagonal `b(0..n)` and off-diagonal `a(1..n)` of the `n x n` truncation.
pub fn truncation(seq: &CoefficientSequence, n: usize) -> (Vec<f64>, Vec<f64>) {
    let diag = (0..n).map(|k| seq.b(k)).collect();
    let off = (1..n).map(|k| seq.a(k)).collect();
    (diag, off)
}

/// Eigenvalues of the `n x n` truncated Jacobi matrix, ascending.
pub fn truncation_eigenvalues(seq: &CoefficientSequence, n: usize) -> Result<Vec<f64>> {
    let (d, e) = truncation(seq, n);
    Ok(tridiag_eigs(&d, &e)?.0)
}

/// Gauss rule of a truncated Jacobi matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub n: usize,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,weight\n");
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            writeln!(out, "{x:?},{w:?}").unwrap();
        }
        out
    }
}

/// Golub-Welsch: nodes are the eigenvalues of the `n x n` truncation,
/// weights the squared first eigenvector components.
pub fn gauss_rule(seq: &CoefficientSequence, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("gauss_rule needs N >= 1".into()));
    }
    let (d, e) = truncation(seq, n);
    let (nodes, weights) = tridiag_eigs(&d, &e)?;
    Ok(QuadratureRule { nodes, weights, n })
}

/// `((J/scale)^k)_00` for `k = 0..=k_max`, `J` the `n x n` truncation.
///
/// The vector `J^k e_0` is supported on the first `k + 1` entries, so the
/// work is `O(k_max^2)` regardless of `n`.
pub fn truncation_moments(seq: &CoefficientSequence, k_max: usize, n: usize, scale: f64) -> Vec<f64> {
    let size = n.min(k_max + 2).max(1);
    let diag: Vec<f64> = (0..size).map(|i| seq.b(i) / scale).collect();
    let off: Vec<f64> = (1..size).map(|i| seq.a(i) / scale).collect();
    let mut v = vec![0.0; size];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        out.push(v[0]);
        if k == k_max {
            break;
        }
        let reach = (k + 1).min(size - 1);
        let mut w = vec![0.0; size];
        for i in 0..=reach {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < size {
                s += off[i] * v[i + 1];
            }
            w[i] = s;
        }
        v = w;
    }
    out
}

/// Gershgorin bound on the spectral radius of the `n x n` truncation.
pub fn gershgorin_bound(seq: &CoefficientSequence, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let left = if i > 0 { seq.a(i) } else { 0.0 };
            let right = if i + 1 < n { seq.a(i + 1) } else { 0.0 };
            seq.b(i).abs() + left + right
        })
        .fold(0.0, f64::max)
}

/// Whether the eigenvalues of the `n` and `n + 1` truncations strictly
/// interlace.
pub fn interlacing_check(seq: &CoefficientSequence, n: usize) -> Result<bool> {
    let small = truncation_eigenvalues(seq, n)?;
    let big = truncation_eigenvalues(seq, n + 1)?;
    Ok(small
        .iter()
        .enumerate()
        .all(|(i, &l)| big[i] < l && l < big[i + 1]))
}

/// Gram matrix of `p_0..=p_{n_max}` against a measure.
#[derive(Clone, Debug, Serialize)]
pub struct OrthonormalityReport {
    pub n_max: usize,
    pub gram: Vec<Vec<f64>>,
    /// `max |G(i,j) - delta(i,j)|`.
    pub max_error: f64,
    /// Largest change of a Gram entry when every other density sample is
    /// dropped (`None` when the continuous part is integrated exactly).
    pub refinement_disagreement: Option<f64>,
}

/// Largest refinement disagreement accepted before a grid is declared too
/// coarse for the requested degree.
pub const GRID_DISAGREEMENT_LIMIT: f64 = 1e-2;

/// `G(i,j) = int p_i p_j dmu` for `i, j <= n_max <= 12`.
pub fn orthonormality_check(
    seq: &CoefficientSequence,
    measure: &SpectralMeasure,
    n_max: usize,
) -> Result<OrthonormalityReport> {
    if n_max > 12 {
        return Err(Error::InvalidArgument(format!("orthonormality_check supports n_max <= 12, got {n_max}")));
    }
    let polys = |x: f64| {
        let mut p = vec![1.0, (x - seq.b(0)) / seq.a(1)];
        for k in 1..n_max {
            p.push(((x - seq.b(k)) * p[k] - seq.a(k) * p[k - 1]) / seq.a(k + 1));
        }
        p.truncate(n_max + 1);
        p
    };
    let entry = |i: usize, j: usize, stride: Option<usize>| {
        let f = |x: f64| {
            let p = polys(x);
            p[i] * p[j]
        };
        match stride {
            None => measure.integrate(f),
            Some(s) => {
                measure.integrate_samples(f, s) + measure.points.iter().map(|&(x, m)| m * f(x)).sum::<f64>()
            }
        }
    };

    let exact = measure.ac_rule.is_some() || measure.ac_samples.is_empty();
    let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
    let mut max_error: f64 = 0.0;
    let mut disagreement: f64 = 0.0;
    for i in 0..=n_max {
        for j in 0..=i {
            let g = entry(i, j, None);
            gram[i][j] = g;
            gram[j][i] = g;
            max_error = max_error.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            if !exact {
                let coarse = entry(i, j, Some(2));
                disagreement = disagreement.max((coarse - g).abs());
            }
        }
    }
    if !exact && disagreement > GRID_DISAGREEMENT_LIMIT {
        return Err(Error::GridTooCoarse {
            disagreement,
            limit: GRID_DISAGREEMENT_LIMIT,
        });
    }
    Ok(OrthonormalityReport {
        n_max,
        gram,
        max_error,
        refinement_disagreement: (!exact).then_some(disagreement),
    })
}

/// Closed-form normalised weights: `hermite` (`exp(-x^2)/sqrt(pi)`) and
/// `semicircle` (`(2/pi) sqrt(1 - x^2)` on `[-1, 1]`).
pub fn classical_weight(name: &str, x: f64) -> Result<f64> {
    use std::f64::consts::PI;
    match name {
        "hermite" => Ok((-x * x).exp() / PI.sqrt()),
        "semicircle" => Ok(if x.abs() < 1.0 {
            2.0 / PI * (1.0 - x * x).sqrt()
        } else {
            0.0
        }),
        other => Err(Error::UnsupportedWeight(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_matrices() {
        let (l, w) = tridiag_eigs(&[0.0, 0.0], &[1.0]).unwrap();
        assert_relative_eq!(l[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(l[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(w[0], 0.5, epsilon = 1e-15);
        let (l, w) = tridiag_eigs(&[2.5], &[]).unwrap();
        assert_eq!((l, w), (vec![2.5], vec![1.0]));
        assert!(tridiag_eigs(&[0.0, 0.0], &[0.0]).is_err());
    }

    #[test]
    fn free_matrix_chebyshev_spectrum() {
        let seq = CoefficientSequence::constant(0.5, 0.0).unwrap();
        let l = truncation_eigenvalues(&seq, 50).unwrap();
        for (i, &v) in l.iter().enumerate() {
            let k = 50 - i;
            let want = (k as f64 * std::f64::consts::PI / 51.0).cos();
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
    }

    #[test]
    fn gauss_rule_basics() {
        let h = CoefficientSequence::hermite();
        let r = gauss_rule(&h, 1).unwrap();
        assert_eq!((r.nodes.clone(), r.weights.clone()), (vec![0.0], vec![1.0]));
        let r = gauss_rule(&h, 20).unwrap();
        assert_relative_eq!(r.integrate(|x| x * x), 0.5, max_relative = 1e-10);
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.to_csv().starts_with("node,weight\n"));
    }

    #[test]
    fn moments_of_truncation() {
        let seq = CoefficientSequence::power_law(1.0, 1.0, 0.0, 4.0, 1.5).unwrap();
        let m = truncation_moments(&seq, 2, 10, 1.0);
        assert_eq!(m[0], 1.0);
        assert_eq!(m[1], seq.b(0));
        assert_relative_eq!(m[2], seq.b(0).powi(2) + seq.a(1).powi(2));
    }

    #[test]
    fn interlacing_small() {
        let h = CoefficientSequence::hermite();
        for n in [1, 2, 7, 30] {
            assert!(interlacing_check(&h, n).unwrap());
        }
    }

    #[test]
    fn classical_weights() {
        assert_relative_eq!(classical_weight("hermite", 0.0).unwrap(), 0.5641895835, epsilon = 1e-10);
        assert_relative_eq!(classical_weight("hermite", 1.0).unwrap(), 0.2075537487, epsilon = 1e-10);
        assert_eq!(classical_weight("hermite", 0.7).unwrap(), classical_weight("hermite", -0.7).unwrap());
        assert!(matches!(classical_weight("laguerre", 1.0), Err(Error::UnsupportedWeight(_))));
    }

    #[test]
    fn orthonormality_against_gauss_points() {
        // a Gauss rule with N nodes is exact for p_i p_j when i + j <= 2N - 1
        let h = CoefficientSequence::hermite();
        let rule = gauss_rule(&h, 10).unwrap();
        let mut m = SpectralMeasure::new(crate::spectral::MeasureKind::Discrete);
        m.points = rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
        let r = orthonormality_check(&h, &m, 8).unwrap();
        assert!(r.max_error < 1e-12, "{}", r.max_error);
        assert!(orthonormality_check(&h, &m, 13).is_err());
    }

    #[test]
    fn coarse_grid_is_detected() {
        let h = CoefficientSequence::hermite();
        let mut m = SpectralMeasure::new(crate::spectral::MeasureKind::Ac);
        m.ac_samples = (0..=16)
            .map(|i| -8.0 + i as f64)
            .map(|x| (x, classical_weight("hermite", x).unwrap()))
            .collect();
        assert!(matches!(orthonormality_check(&h, &m, 12), Err(Error::GridTooCoarse { .. })));
    }
}
