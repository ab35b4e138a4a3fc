//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line to
//! stderr (uncaptured, so the lines appear in plain `cargo test` output).
//!
//! The convergence-rate criterion asks for slope -1 on the Hermite
//! recurrence, whose epsilon terms decay like k^(-3/2); the measured slope
//! is -1/2. It is implemented as stated, reported as FAIL, and its
//! standalone test is ignored. The suite asserts that it still fails so a
//! change in behaviour is noticed.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use jacobi_spectra::asymptotics::{
    check_band_asymptotic_series, check_offband_asymptotic_series, decay_ratios, median, powers_of_two,
};
use jacobi_spectra::coeffs::least_squares;
use jacobi_spectra::measures::{
    ac_density, ac_measure, discrete_spectrum, seeded_interval, uniform_grid, weak_convergence_check, DensityOptions,
    DiscreteOptions, FrozenSystem,
};
use jacobi_spectra::oracles::{
    classical_weight, gauss_rule, gershgorin_bound, interlacing_check, orthonormality_check, truncation_eigenvalues,
    truncation_moments,
};
use jacobi_spectra::{check_hypotheses, eval_g, rho, CoefficientSequence, LimitOptions, Regime};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn report(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = o.pass && in_time;
    let line = format!(
        "{} [{id:>2}] {name}: {} ({:.2} s of {:.0} s{})\n",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if in_time { "" } else { ", over budget" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    pass
}

fn hermite_recovery() -> Outcome {
    let h = CoefficientSequence::hermite();
    let xs = [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0];
    let mut worst = [0.0f64; 2];
    for (slot, (n_max, _)) in [(100_000usize, 1e-2), (10_000, 3e-2)].iter().enumerate() {
        let opts = DensityOptions {
            tol: 0.0,
            n_max: *n_max,
            richardson: false,
        };
        for &x in &xs {
            let d = ac_density(&h, x, &opts).expect("density").density;
            worst[slot] = worst[slot].max((d - classical_weight("hermite", x).unwrap()).abs());
        }
    }
    outcome(
        worst[0] <= 1e-2 && worst[1] <= 3e-2,
        format!("max abs error {:.2e} at n=1e5 (limit 1e-2), {:.2e} at n=1e4 (limit 3e-2)", worst[0], worst[1]),
    )
}

/// Least-squares slope of log|phi_hat(2n) - phi_hat(n)| against log n.
fn difference_slope(seq: &CoefficientSequence) -> f64 {
    let x = Complex64::new(0.0, 1.0);
    let opts = LimitOptions::for_point(x).with_tol(1e-300).with_n_max(1 << 15);
    let v = eval_g(seq, x, &opts).expect("eval_g");
    let pts: Vec<(f64, f64)> = v
        .checkpoints
        .windows(2)
        .filter(|w| (1 << 7..=1 << 14).contains(&w[0].n))
        .map(|w| ((w[0].n as f64).ln(), w[1].diff.expect("difference").ln()))
        .collect();
    assert_eq!(pts.len(), 8);
    least_squares(&pts).0
}

fn convergence_rate() -> Outcome {
    let slope = difference_slope(&CoefficientSequence::hermite());
    outcome(
        (slope + 1.0).abs() <= 0.2,
        format!("hermite slope {slope:.3} (required -1 +- 0.2; epsilon tail predicts -0.5)"),
    )
}

fn discrete_regime() -> Outcome {
    let seq = CoefficientSequence::power_law(1.0, 1.0, 0.0, 4.0, 0.0).unwrap();
    let opts = DiscreteOptions::default();
    let (lo, hi) = seeded_interval(&seq, 10, 2000).unwrap();
    let points = discrete_spectrum(&seq, lo, hi, &opts).expect("spectrum");
    let eigs = truncation_eigenvalues(&seq, 2000).unwrap();
    let rel = points
        .iter()
        .zip(&eigs)
        .map(|(p, e)| ((p.x - e) / e).abs())
        .fold(0.0, f64::max);
    let positive = points.iter().all(|p| p.mass > 0.0);
    let mass: f64 = points.iter().map(|p| p.mass).sum();
    outcome(
        points.len() == 10 && rel <= 1e-6 && positive && (0.999..=1.0 + 1e-6).contains(&mass),
        format!("{} points, max rel deviation {rel:.1e}, masses positive {positive}, total {mass:.12}", points.len()),
    )
}

fn frozen_semicircle() -> Outcome {
    let seq = CoefficientSequence::constant(0.5, 0.0).unwrap();
    let system = FrozenSystem::new(&seq, 1).unwrap();
    let err = uniform_grid(-0.99, 0.99, 0.001)
        .unwrap()
        .into_iter()
        .map(|x| (system.density(x) - 2.0 / std::f64::consts::PI * (1.0 - x * x).sqrt()).abs())
        .fold(0.0, f64::max);
    let atoms = system.point_masses().unwrap().len();
    outcome(err <= 1e-8 && atoms == 0, format!("max abs error {err:.1e}, {atoms} point masses"))
}

fn weak_convergence() -> Outcome {
    let r = weak_convergence_check(&CoefficientSequence::hermite(), &[3, 5, 8], 16).unwrap();
    let ok = r.rows.iter().all(|row| row.k_max == 2 * row.n0);
    outcome(
        ok && r.max_deviation <= 1e-7,
        format!("max relative moment deviation {:.1e} for k <= 2 n0", r.max_deviation),
    )
}

fn orthonormality() -> Outcome {
    let h = CoefficientSequence::hermite();
    let grid = uniform_grid(-8.0, 8.0, 0.02).unwrap();
    let (measure, _) = ac_measure(&h, &grid, &DensityOptions::default()).unwrap();
    match orthonormality_check(&h, &measure, 8) {
        Ok(r) => outcome(r.max_error <= 1e-2, format!("max |G - I| = {:.1e} for i, j <= 8", r.max_error)),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn asymptotics() -> Outcome {
    let h = CoefficientSequence::hermite();
    let ns = powers_of_two(7, 13);
    let opts = Default::default();
    let band = check_band_asymptotic_series(&h, 0.0, &ns, &opts).unwrap();
    let off = check_offband_asymptotic_series(&h, Complex64::new(0.0, 1.0), &ns, &opts).unwrap();
    let ratio = |r: &[_]| median(&decay_ratios(r)).unwrap();
    let (rb, ro) = (ratio(&band), ratio(&off));
    let decreasing = |r: &[jacobi_spectra::asymptotics::AsymptoticReport]| r.windows(2).all(|w| w[1].residual < w[0].residual);

    let c = CoefficientSequence::constant(1.0, 0.0).unwrap();
    let cb = check_band_asymptotic_series(&c, 0.0, &ns, &opts).unwrap();
    let co = check_offband_asymptotic_series(&c, Complex64::new(0.0, 1.0), &ns, &opts).unwrap();
    let worst_const = cb.iter().chain(&co).map(|r| r.residual).fold(0.0, f64::max);

    let in_range = |r: f64| (0.3..=0.8).contains(&r);
    outcome(
        in_range(rb) && in_range(ro) && decreasing(&band) && decreasing(&off) && worst_const < 1e-10,
        format!("median decay band {rb:.3}, off-band {ro:.3}; constant residual {worst_const:.1e}"),
    )
}

fn map_properties() -> Outcome {
    let (mut modulus, mut inverse) = (0.0f64, 0.0f64);
    for i in 0..100 {
        for j in 0..100 {
            let z = Complex64::new(-10.0 + 20.0 * i as f64 / 99.0, 10f64.powf(-6.0 + 7.0 * j as f64 / 99.0));
            let r = rho(z);
            modulus = modulus.max(1.0 - r.norm());
            inverse = inverse.max((r + 1.0 / r - 2.0 * z).norm() / (1.0 + z.norm()));
        }
    }
    outcome(
        modulus <= 1e-12 && inverse < 1e-12,
        format!("1 - min|rho| = {modulus:.1e}, max scaled inverse error {inverse:.1e} over 1e4 points"),
    )
}

fn oracle_consistency() -> Outcome {
    let h = CoefficientSequence::hermite();
    let mut worst = 0.0f64;
    for n in [10, 50, 200] {
        let rule = gauss_rule(&h, n).unwrap();
        let sigma = gershgorin_bound(&h, 2 * n + 1);
        let exact = truncation_moments(&h, 2 * n - 1, 2 * n + 1, sigma);
        for (k, &m) in exact.iter().enumerate() {
            let quad = rule.integrate(|x| (x / sigma).powi(k as i32));
            let size = rule.integrate(|x| (x / sigma).abs().powi(k as i32));
            worst = worst.max((quad - m).abs() / size);
        }
    }
    let interlaced = (2..=200).all(|n| interlacing_check(&h, n).unwrap());
    outcome(
        worst < 1e-9 && interlaced,
        format!("max relative moment error {worst:.1e}, interlacing for N <= 200 {interlaced}"),
    )
}

fn classifier() -> Outcome {
    let regime = |s: &CoefficientSequence| check_hypotheses(s, 4096, 1e-3).unwrap();
    let h = regime(&CoefficientSequence::hermite());
    let d = regime(&CoefficientSequence::power_law(1.0, 1.0, 0.0, 4.0, 0.0).unwrap());
    let exp = regime(&CoefficientSequence::from_fn("exponential", |n| 2f64.powi(n as i32), |_| 0.0).unwrap());
    let ex = regime(&CoefficientSequence::linear_shift(1.0, 0.0, 2.0, 1.0).unwrap());
    let classes_ok = h.regime == Regime::Ac
        && d.regime == Regime::Discrete
        && !exp.hypotheses_hold
        && ex.regime == Regime::Excluded;

    let bin = env!("CARGO_BIN_EXE_jacobi-spectra");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    let codes = [
        code(&["hypotheses", "--preset", "hermite"]),
        code(&["hypotheses", "--preset", "power_law", "--params", "α=1,p=1,γ=4,δ=0"]),
        code(&["hypotheses", "--preset", "linear_shift", "--params", "alpha=1,gamma=2,delta=1"]),
        code(&["hypotheses", "--preset", "power_law", "--params", "alpha=x"]),
        code(&["spectrum", "--preset", "hermite"]),
        code(&["density", "--preset", "hermite", "--grid", "0:0.5:0.5", "--nmax", "64", "--tol", "1e-12"]),
    ];
    let expected = [Some(0), Some(0), Some(2), Some(1), Some(2), Some(3)];
    outcome(
        classes_ok && codes == expected,
        format!(
            "regimes {:?}/{:?}/hold={}/{:?}, exit codes {:?}",
            h.regime,
            d.regime,
            exp.hypotheses_hold,
            ex.regime,
            codes.map(|c| c.unwrap_or(-1))
        ),
    )
}

#[test]
fn acceptance_suite() {
    let s = Duration::from_secs;
    let results = [
        report(1, "hermite recovery", s(5), hermite_recovery),
        report(2, "convergence rate", s(2), convergence_rate),
        report(3, "discrete regime", s(30), discrete_regime),
        report(4, "frozen semicircle", s(1), frozen_semicircle),
        report(5, "weak convergence", s(5), weak_convergence),
        report(6, "orthonormality", s(10), orthonormality),
        report(7, "asymptotics", s(10), asymptotics),
        report(8, "map properties", s(1), map_properties),
        report(9, "oracle self-consistency", s(5), oracle_consistency),
        report(10, "hypothesis classifier", s(2), classifier),
    ];
    let failed: Vec<usize> = (1..=10).filter(|i| !results[i - 1]).collect();
    assert_eq!(failed, vec![2], "only the unattainable convergence-rate criterion may fail");
}

#[test]
#[ignore = "unattainable as stated: hermite epsilon tail gives slope -1/2"]
fn convergence_rate_as_stated() {
    assert!(convergence_rate().pass);
}

#[test]
fn convergence_rate_follows_epsilon_tail() {
    // the slope tracks the epsilon tail: -1/2 for hermite, -1 for a(n) = n
    let hermite = difference_slope(&CoefficientSequence::hermite());
    let linear = difference_slope(&CoefficientSequence::power_law(1.0, 1.0, 0.0, 0.0, 0.0).unwrap());
    assert!((hermite + 0.5).abs() < 0.1, "{hermite}");
    assert!((linear + 1.0).abs() < 0.1, "{linear}");
}
