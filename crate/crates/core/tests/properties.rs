//! Property tests for the maps, the recurrence and the coefficient model.

use jacobi_spectra::coeffs::epsilon_tail;
use jacobi_spectra::maps::{rho, transfer};
use jacobi_spectra::recurrence::ScaledState;
use jacobi_spectra::CoefficientSequence;
use num::{BigInt, BigRational, ToPrimitive};
use num_complex::Complex64;
use proptest::prelude::*;

/// `p_0..=p_n` at rational `x` in exact arithmetic, for integer `a`, `b`.
fn exact_polys(a: impl Fn(usize) -> i64, b: impl Fn(usize) -> i64, x: &BigRational, n: usize) -> Vec<BigRational> {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut p = vec![int(1)];
    let mut prev = int(0);
    for k in 0..n {
        // a(k+1) p(k+1) = (x - b(k)) p(k) - a(k) p(k-1)
        let next = ((x - int(b(k))) * &p[k] - int(a(k)) * &prev) / int(a(k + 1));
        prev = p[k].clone();
        p.push(next);
    }
    p
}

fn upper_half_plane() -> impl Strategy<Value = Complex64> {
    (-50.0f64..50.0, -8.0f64..2.0).prop_map(|(re, log_im)| Complex64::new(re, 10f64.powf(log_im)))
}

proptest! {
    #[test]
    fn rho_maps_outside_the_disk(z in upper_half_plane()) {
        let r = rho(z);
        prop_assert!(r.norm() >= 1.0 - 1e-12);
        prop_assert!((r + 1.0 / r - 2.0 * z).norm() <= 1e-12 * (1.0 + z.norm()));
    }

    #[test]
    fn transfer_roots_multiply_to_the_ratio(z in upper_half_plane(), n in 1i64..10_000) {
        let seq = CoefficientSequence::power_law(1.0, 0.75, 0.5, 0.3, 0.0).unwrap();
        let t = transfer(&seq, n, z);
        let ratio = seq.a(n as usize) / seq.a(n as usize + 1);
        prop_assert!((t.t1 * t.t2 - ratio).norm() <= 1e-12 * ratio);
        prop_assert!(t.t1.norm() >= t.t2.norm() * (1.0 - 1e-12));
    }

    #[test]
    fn freezing_is_idempotent(m in 1usize..40, n in 1usize..40) {
        let h = CoefficientSequence::hermite();
        let once = h.frozen(m.min(n)).unwrap();
        let twice = h.frozen(m).unwrap().frozen(n).unwrap();
        for k in 1..120 {
            prop_assert_eq!(once.a(k), twice.a(k));
            prop_assert_eq!(once.b(k - 1), twice.b(k - 1));
        }
    }

    #[test]
    fn epsilon_tail_shrinks_with_n(n1 in 1usize..2000, gap in 1usize..2000) {
        let h = CoefficientSequence::hermite();
        let big = 4096;
        let t1 = epsilon_tail(&h, n1, big).unwrap();
        let t2 = epsilon_tail(&h, (n1 + gap).min(big), big).unwrap();
        prop_assert!(t2.partial <= t1.partial);
        prop_assert!(t2.total() <= t1.total() * (1.0 + 1e-12));
    }

    #[test]
    fn scaled_recurrence_matches_exact_arithmetic(
        num in -40i64..40,
        alpha in 1i64..4,
        gamma in -6i64..6,
        a0 in 1i64..5,
        linear in any::<bool>(),
    ) {
        let x = BigRational::new(BigInt::from(num), BigInt::from(4));
        let xf = x.to_f64().unwrap();
        let (seq, exact) = if linear {
            let s = CoefficientSequence::power_law(alpha as f64, 1.0, 0.0, gamma as f64, 0.0).unwrap();
            (s, exact_polys(|k| alpha * k as i64, |k| gamma * k as i64, &x, 8))
        } else {
            let s = CoefficientSequence::constant(a0 as f64, gamma as f64).unwrap();
            (s, exact_polys(|k| if k == 0 { 0 } else { a0 }, |_| gamma, &x, 8))
        };
        let mut state = ScaledState::init(Complex64::new(xf, 0.0));
        for (n, p) in exact.iter().enumerate().skip(1) {
            state.advance(&seq).unwrap();
            prop_assert_eq!(state.n, n);
            let want = p.to_f64().unwrap();
            let got = state.p();
            let scale = want.abs().max(1e-300);
            prop_assert!((got.re - want).abs() <= 1e-10 * scale + 1e-14, "n = {}: {} vs {}", n, got, want);
            prop_assert!(got.im.abs() <= 1e-10 * scale + 1e-14, "n = {}: {}", n, got);
        }
    }
}
