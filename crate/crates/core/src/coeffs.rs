//! Recurrence coefficient sequences and the diagnostics that decide which
//! regime a sequence falls into.
//!
//! Indices follow the three-term recurrence
//!
//! ```text
//! a(n+1) p(n+1) + b(n) p(n) + a(n) p(n-1) = x p(n),   p(0) = 1, p(-1) = 0
//! ```
//!
//! so `a` is indexed from 1 and `b` from 0.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the band around `|d| = 1` classified as excluded.
pub const EXCLUSION_BAND: f64 = 1e-3;

/// Sample size used for the cached hypothesis report of a sequence.
pub const DEFAULT_HYPOTHESIS_N: usize = 4096;

type IndexFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Hermite,
    PowerLaw {
        alpha: f64,
        p: f64,
        kappa: f64,
        gamma: f64,
        delta: f64,
    },
    Constant {
        a: f64,
        b: f64,
    },
    Table(Arc<Table>),
    Custom {
        a: IndexFn,
        b: IndexFn,
    },
    Frozen {
        base: Arc<CoefficientSequence>,
        n0: usize,
    },
}

/// How a finite coefficient table is continued past its last entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuation {
    FreezeLast,
    PowerFit,
}

#[derive(Clone, Debug)]
struct Table {
    a: Vec<f64>,
    b: Vec<f64>,
    tail: Tail,
}

#[derive(Clone, Copy, Debug)]
enum Tail {
    Freeze,
    /// a(n) = c n^p, b(n) = beta n^p + delta
    Power { c: f64, p: f64, beta: f64, delta: f64 },
}

impl Table {
    fn a(&self, n: usize) -> f64 {
        if n <= self.a.len() {
            return self.a[n - 1];
        }
        match self.tail {
            Tail::Freeze => *self.a.last().unwrap(),
            Tail::Power { c, p, .. } => c * (n as f64).powf(p),
        }
    }

    fn b(&self, n: usize) -> f64 {
        if n < self.b.len() {
            return self.b[n];
        }
        match self.tail {
            Tail::Freeze => *self.b.last().unwrap(),
            Tail::Power { p, beta, delta, .. } => beta * (n as f64).powf(p) + delta,
        }
    }
}

/// Jacobi data `(a(n), b(n))` of a recurrence, with a label and the preset
/// parameters it was built from.
///
/// Sequences are cheap to clone; the hypothesis report used by downstream
/// operations is computed once and shared between clones.
#[derive(Clone)]
pub struct CoefficientSequence {
    label: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
    report: Arc<OnceLock<HypothesisReport>>,
}

impl fmt::Debug for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSequence")
            .field("label", &self.label)
            .field("params", &self.params)
            .finish()
    }
}

impl CoefficientSequence {
    fn new(label: impl Into<String>, params: BTreeMap<String, f64>, kind: Kind) -> Self {
        Self {
            label: label.into(),
            params,
            kind,
            report: Arc::new(OnceLock::new()),
        }
    }

    /// Hermite system: `a(n) = sqrt(n/2)`, `b(n) = 0`.
    pub fn hermite() -> Self {
        Self::new("hermite", BTreeMap::new(), Kind::Hermite)
    }

    /// `a(n) = alpha n^p + kappa`, `b(n) = gamma n^p + delta`.
    pub fn power_law(alpha: f64, p: f64, kappa: f64, gamma: f64, delta: f64) -> Result<Self> {
        let params = BTreeMap::from([
            ("alpha".to_string(), alpha),
            ("p".to_string(), p),
            ("kappa".to_string(), kappa),
            ("gamma".to_string(), gamma),
            ("delta".to_string(), delta),
        ]);
        let seq = Self::new(
            "power_law",
            params,
            Kind::PowerLaw {
                alpha,
                p,
                kappa,
                gamma,
                delta,
            },
        );
        check_power_positivity(alpha, p, kappa)?;
        seq.check_prefix_positive(256)?;
        Ok(seq)
    }

    /// `a(n) = alpha n + kappa`, `b(n) = gamma n + delta`.
    pub fn linear_shift(alpha: f64, kappa: f64, gamma: f64, delta: f64) -> Result<Self> {
        let mut seq = Self::power_law(alpha, 1.0, kappa, gamma, delta)?;
        seq.label = "linear_shift".into();
        seq.params.remove("p");
        Ok(seq)
    }

    pub fn constant(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::NonPositiveCoefficient { index: 1, value: a });
        }
        let params = BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]);
        Ok(Self::new("constant", params, Kind::Constant { a, b }))
    }

    /// Finite table; `a[0]` is `a(1)` and `b[0]` is `b(0)`.
    pub fn table(a: Vec<f64>, b: Vec<f64>, continuation: Continuation) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::BadTable("both `a` and `b` need at least one entry".into()));
        }
        for (i, &v) in a.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveCoefficient { index: i + 1, value: v });
            }
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadTable("non-finite entry in `b`".into()));
        }
        let tail = match continuation {
            Continuation::FreezeLast => Tail::Freeze,
            Continuation::PowerFit => power_fit_tail(&a, &b)?,
        };
        let label = match continuation {
            Continuation::FreezeLast => "table:freeze_last",
            Continuation::PowerFit => "table:power_fit",
        };
        Ok(Self::new(label, BTreeMap::new(), Kind::Table(Arc::new(Table { a, b, tail }))))
    }

    /// Arbitrary sequence from closures. Positivity of `a` is checked on a
    /// finite prefix only.
    pub fn from_fn<A, B>(label: impl Into<String>, a: A, b: B) -> Result<Self>
    where
        A: Fn(usize) -> f64 + Send + Sync + 'static,
        B: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        let seq = Self::new(
            label,
            BTreeMap::new(),
            Kind::Custom {
                a: Arc::new(a),
                b: Arc::new(b),
            },
        );
        seq.check_prefix_positive(64)?;
        Ok(seq)
    }

    fn check_prefix_positive(&self, len: usize) -> Result<()> {
        for n in 1..=len {
            let v = self.a(n);
            if !(v > 0.0) {
                return Err(Error::NonPositiveCoefficient { index: n, value: v });
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Off-diagonal coefficient `a(n)`, `n >= 1`.
    #[inline]
    pub fn a(&self, n: usize) -> f64 {
        debug_assert!(n >= 1, "a is indexed from 1");
        match &self.kind {
            Kind::Hermite => (n as f64 / 2.0).sqrt(),
            Kind::PowerLaw {
                alpha, p, kappa, ..
            } => alpha * (n as f64).powf(*p) + kappa,
            Kind::Constant { a, .. } => *a,
            Kind::Table(t) => t.a(n),
            Kind::Custom { a, .. } => a(n),
            Kind::Frozen { base, n0 } => base.a(n.min(*n0)),
        }
    }

    /// Diagonal coefficient `b(n)`, `n >= 0`.
    #[inline]
    pub fn b(&self, n: usize) -> f64 {
        match &self.kind {
            Kind::Hermite => 0.0,
            Kind::PowerLaw { p, gamma, delta, .. } => gamma * (n as f64).powf(*p) + delta,
            Kind::Constant { b, .. } => *b,
            Kind::Table(t) => t.b(n),
            Kind::Custom { b, .. } => b(n),
            Kind::Frozen { base, n0 } => base.b(n.min(*n0)),
        }
    }

    /// Hypothesis report at the default sample size, computed once.
    pub fn hypotheses(&self) -> &HypothesisReport {
        self.report.get_or_init(|| {
            check_hypotheses_with(self, &HypothesisConfig::default())
        })
    }

    /// The sequence with coefficients held at their `n0` values from `n0` on.
    pub fn frozen(&self, n0: usize) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidArgument("frozen index n0 must be >= 1".into()));
        }
        let (base, n0) = match &self.kind {
            Kind::Frozen { base, n0: inner } => (base.clone(), n0.min(*inner)),
            _ => (Arc::new(self.clone()), n0),
        };
        let mut params = base.params.clone();
        params.insert("n0".into(), n0 as f64);
        Ok(Self::new(
            format!("{}|frozen", base.label),
            params,
            Kind::Frozen { base, n0 },
        ))
    }
}

fn check_power_positivity(alpha: f64, p: f64, kappa: f64) -> Result<()> {
    let bad = |value: f64| Error::InvalidParameter {
        name: "alpha/kappa".into(),
        reason: format!("a(n) is eventually nonpositive (limit {value})"),
    };
    if ![alpha, p, kappa].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha/p/kappa".into(),
            reason: "non-finite value".into(),
        });
    }
    if p > 0.0 && alpha < 0.0 {
        return Err(bad(f64::NEG_INFINITY));
    }
    if p > 0.0 && alpha == 0.0 && kappa <= 0.0 {
        return Err(bad(kappa));
    }
    if p < 0.0 && kappa <= 0.0 {
        return Err(bad(kappa));
    }
    Ok(())
}

fn power_fit_tail(a: &[f64], b: &[f64]) -> Result<Tail> {
    let start = (a.len() / 2).max(1);
    let pts: Vec<(f64, f64)> = (start..=a.len())
        .map(|n| ((n as f64).ln(), a[n - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::BadTable("power_fit needs at least two `a` entries".into()));
    }
    let (slope, intercept) = least_squares(&pts);
    let p = slope;
    let c = intercept.exp();
    // b(n) = beta n^p + delta with the exponent of a
    let bstart = (b.len() / 2).min(b.len().saturating_sub(2));
    let bpts: Vec<(f64, f64)> = (bstart..b.len())
        .filter(|&n| n > 0)
        .map(|n| ((n as f64).powf(p), b[n]))
        .collect();
    let (beta, delta) = if bpts.len() >= 2 && bpts.iter().any(|q| q.0 != bpts[0].0) {
        least_squares(&bpts)
    } else {
        (0.0, *b.last().unwrap())
    };
    if !(c > 0.0) || !p.is_finite() {
        return Err(Error::BadTable("power fit of `a` failed".into()));
    }
    Ok(Tail::Power { c, p, beta, delta })
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least squares slope of `y = c x` through the origin; 0 when all `x` vanish.
pub(crate) fn least_squares_origin(pts: &[(f64, f64)]) -> f64 {
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    pts.iter().map(|p| p.0 * p.1).sum::<f64>() / sxx
}

/// Parameter map of a named preset.
pub type Params = BTreeMap<String, f64>;

fn param(params: &Params, names: &[&str], default: Option<f64>) -> Result<f64> {
    for n in names {
        if let Some(&v) = params.get(*n) {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: (*n).into(),
                    reason: "not finite".into(),
                });
            }
            return Ok(v);
        }
    }
    default.ok_or_else(|| Error::InvalidParameter {
        name: names[0].into(),
        reason: "missing".into(),
    })
}

fn reject_unknown(params: &Params, allowed: &[&str]) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::InvalidParameter {
                name: k.clone(),
                reason: "not a parameter of this preset".into(),
            });
        }
    }
    Ok(())
}

/// Build a named family from its parameters.
///
/// Families: `hermite`, `power_law` (`alpha`, `p`, optional `kappa`,
/// `gamma`, `delta`), `linear_shift` (`alpha`, optional `kappa`, `gamma`,
/// `delta`), `constant` (`a`, optional `b`). Greek keys (`α`, `κ`, `γ`,
/// `δ`) are accepted. Tables go through [`CoefficientSequence::table`].
pub fn preset(name: &str, params: &Params) -> Result<CoefficientSequence> {
    const ALPHA: &[&str] = &["alpha", "α"];
    const KAPPA: &[&str] = &["kappa", "κ"];
    const GAMMA: &[&str] = &["gamma", "γ"];
    const DELTA: &[&str] = &["delta", "δ"];
    match name {
        "hermite" => {
            reject_unknown(params, &[])?;
            Ok(CoefficientSequence::hermite())
        }
        "power_law" => {
            reject_unknown(
                params,
                &["alpha", "α", "p", "kappa", "κ", "gamma", "γ", "delta", "δ"],
            )?;
            CoefficientSequence::power_law(
                param(params, ALPHA, None)?,
                param(params, &["p"], None)?,
                param(params, KAPPA, Some(0.0))?,
                param(params, GAMMA, Some(0.0))?,
                param(params, DELTA, Some(0.0))?,
            )
        }
        "linear_shift" => {
            reject_unknown(params, &["alpha", "α", "kappa", "κ", "gamma", "γ", "delta", "δ"])?;
            CoefficientSequence::linear_shift(
                param(params, ALPHA, None)?,
                param(params, KAPPA, Some(0.0))?,
                param(params, GAMMA, Some(0.0))?,
                param(params, DELTA, Some(0.0))?,
            )
        }
        "constant" => {
            reject_unknown(params, &["a", "b"])?;
            CoefficientSequence::constant(param(params, &["a"], None)?, param(params, &["b"], Some(0.0))?)
        }
        "table" => Err(Error::InvalidArgument(
            "table sequences need explicit `a`/`b` lists; use the table form".into(),
        )),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// JSON description of a sequence:
/// `{"preset": name, "params": {...}}` or
/// `{"table": {"a": [...], "b": [...], "continuation": "freeze_last" | "power_fit"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceSpec {
    Preset {
        preset: String,
        #[serde(default)]
        params: Params,
    },
    Table {
        table: TableSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation: Option<Continuation>,
}

impl SequenceSpec {
    pub fn build(&self) -> Result<CoefficientSequence> {
        match self {
            SequenceSpec::Preset { preset: name, params } => preset(name, params),
            SequenceSpec::Table { table } => {
                let cont = table.continuation.ok_or(Error::MissingContinuation)?;
                CoefficientSequence::table(table.a.clone(), table.b.clone(), cont)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The bounded-variation increment
/// `|1/a(i+1) - 1/a(i+2)| + |a(i)/a(i+1) - a(i+1)/a(i+2)| + |b(i)/a(i+1) - b(i+1)/a(i+2)|`.
pub fn epsilon(seq: &CoefficientSequence, i: usize) -> f64 {
    debug_assert!(i >= 1);
    let (a0, a1, a2) = (seq.a(i), seq.a(i + 1), seq.a(i + 2));
    let (b0, b1) = (seq.b(i), seq.b(i + 1));
    (1.0 / a1 - 1.0 / a2).abs() + (a0 / a1 - a1 / a2).abs() + (b0 / a1 - b1 / a2).abs()
}

/// Partial sum of `epsilon` over `[n, N]` and, separately, an extrapolated
/// estimate of the sum beyond `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsilonTail {
    pub partial: f64,
    /// `None` when the terms do not admit a summable power-law fit.
    pub remainder: Option<f64>,
}

impl EpsilonTail {
    /// Partial sum plus remainder; infinite when no remainder is available.
    pub fn total(&self) -> f64 {
        match self.remainder {
            Some(r) => self.partial + r,
            None => f64::INFINITY,
        }
    }
}

pub fn epsilon_tail(seq: &CoefficientSequence, n: usize, big_n: usize) -> Result<EpsilonTail> {
    if n < 1 || n > big_n {
        return Err(Error::InvalidArgument(format!(
            "epsilon_tail needs 1 <= n <= N (got n = {n}, N = {big_n})"
        )));
    }
    let partial: f64 = (n..=big_n).map(|i| epsilon(seq, i)).sum();
    let remainder = power_tail(|i| epsilon(seq, i), big_n).map(|t| t.remainder);
    Ok(EpsilonTail { partial, remainder })
}

/// Power-law fit `term(i) ~ C i^-q` over the last decade of `[1, n]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PowerTail {
    pub q: f64,
    /// Estimated sum of the terms beyond `n`.
    pub remainder: f64,
}

pub(crate) fn power_tail(term: impl Fn(usize) -> f64, n: usize) -> Option<PowerTail> {
    let lo = (n / 10).max(1);
    let samples = log_spaced(lo, n, 64);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&i| (i, term(i)))
        .filter(|(_, v)| v.is_finite() && *v > 1e-300)
        .map(|(i, v)| ((i as f64).ln(), v.ln()))
        .collect();
    if pts.is_empty() {
        let all_zero = samples.iter().all(|&i| term(i) == 0.0);
        return all_zero.then_some(PowerTail {
            q: f64::INFINITY,
            remainder: 0.0,
        });
    }
    if pts.len() < 8 {
        return None;
    }
    let (slope, intercept) = least_squares(&pts);
    let q = -slope;
    let resid = (pts
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    if q <= 1.02 || resid > 0.25 {
        return None;
    }
    let c = intercept.exp();
    let remainder = c * (n as f64 + 0.5).powf(1.0 - q) / (q - 1.0);
    Some(PowerTail { q, remainder })
}

/// Up to `count` distinct integers spread logarithmically over `[lo, hi]`.
pub(crate) fn log_spaced(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if hi <= lo {
        return vec![hi];
    }
    let (l, h) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|k| (l + (h - l) * k as f64 / (count - 1) as f64).exp().round() as usize)
        .map(|i| i.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Regime {
    /// `|d| < 1`: absolutely continuous measure.
    Ac,
    /// `|d| > 1`: purely discrete measure.
    Discrete,
    /// `|d|` within the exclusion band around 1.
    Excluded,
    Unknown,
}

/// Saturation test for one of the three bounded-variation sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummabilityVerdict {
    pub name: &'static str,
    pub partial_half: f64,
    pub partial_full: f64,
    /// Extrapolated remainder beyond N, when a power-law fit exists.
    pub tail_estimate: Option<f64>,
    pub summable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// Largest index examined (smaller than requested if the coefficients
    /// stop being finite).
    pub n_effective: usize,
    pub d_estimate: f64,
    pub ratio_limit_estimate: f64,
    pub a_unbounded: bool,
    pub epsilon_partial_sums: Vec<(usize, f64)>,
    pub summability_verdicts: [SummabilityVerdict; 3],
    pub carleman_partial_sum: f64,
    pub carleman_diverges: bool,
    pub hypotheses_hold: bool,
    pub regime: Regime,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct HypothesisConfig {
    pub n: usize,
    /// Saturation tolerance and allowed deviation of the ratio limit from 1.
    pub tol: f64,
    pub exclusion: f64,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_HYPOTHESIS_N,
            tol: 1e-3,
            exclusion: EXCLUSION_BAND,
        }
    }
}

pub fn check_hypotheses(seq: &CoefficientSequence, n: usize, tol: f64) -> Result<HypothesisReport> {
    if n < 100 {
        return Err(Error::InvalidArgument(format!("check_hypotheses needs N >= 100, got {n}")));
    }
    Ok(check_hypotheses_with(
        seq,
        &HypothesisConfig {
            n,
            tol,
            exclusion: EXCLUSION_BAND,
        },
    ))
}

/// Fit `y(n) = limit + c/n` over sampled indices, returning `limit`.
fn extrapolate_limit(samples: &[usize], y: impl Fn(usize) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|&n| (1.0 / n as f64, y(n))).collect();
    least_squares(&pts).1
}

pub fn check_hypotheses_with(seq: &CoefficientSequence, cfg: &HypothesisConfig) -> HypothesisReport {
    let mut warnings = Vec::new();
    // first index at which a(n+2) or b(n+1) stops being finite
    let mut n_eff = cfg.n;
    for i in 1..=cfg.n {
        let ok = seq.a(i + 2).is_finite() && seq.a(i + 2) > 0.0 && seq.b(i + 1).is_finite();
        if !ok {
            n_eff = i.saturating_sub(1);
            warnings.push(format!("coefficients not finite beyond n = {n_eff}"));
            break;
        }
    }

    let lo = (n_eff / 10).max(1);
    let window = log_spaced(lo, n_eff.max(1), 256);
    let d_estimate = extrapolate_limit(&window, |n| seq.b(n) / (2.0 * seq.a(n + 1)));
    let ratio_limit_estimate = extrapolate_limit(&window, |n| seq.a(n) / seq.a(n + 1));
    let growth: Vec<(f64, f64)> = window
        .iter()
        .map(|&n| ((n as f64).ln(), seq.a(n).ln()))
        .collect();
    let a_unbounded = growth.len() >= 2 && least_squares(&growth).0 > 0.05;

    // single pass for epsilon and the three bounded-variation sums
    let mut eps_sums = Vec::new();
    let mut eps_acc = 0.0;
    let mut next_mark = 1;
    let terms: [&dyn Fn(usize) -> f64; 3] = [
        &|i| (1.0 / seq.a(i + 1) - 1.0 / seq.a(i)).abs(),
        &|i| (seq.a(i) / seq.a(i + 1) - seq.a(i + 1) / seq.a(i + 2)).abs(),
        &|i| (seq.b(i) / seq.a(i + 1) - seq.b(i + 1) / seq.a(i + 2)).abs(),
    ];
    let mut sums = [0.0f64; 3];
    let mut half = [0.0f64; 3];
    // the b-series starts at i = 0
    sums[2] = terms[2](0);
    for i in 1..=n_eff {
        eps_acc += epsilon(seq, i);
        for (s, t) in sums.iter_mut().zip(terms.iter()) {
            *s += t(i);
        }
        if i == n_eff / 2 {
            half = sums;
        }
        if i == next_mark || i == n_eff {
            eps_sums.push((i, eps_acc));
            if i == next_mark {
                next_mark *= 2;
            }
        }
    }
    eps_sums.dedup_by_key(|p| p.0);

    let names = ["|1/a(n+1) - 1/a(n)|", "|a(n)/a(n+1) - a(n+1)/a(n+2)|", "|b(n)/a(n+1) - b(n+1)/a(n+2)|"];
    let verdicts: [SummabilityVerdict; 3] = std::array::from_fn(|k| {
        let fit = power_tail(terms[k], n_eff.max(1));
        let saturated = (sums[k] - half[k]).abs() <= cfg.tol;
        let by_fit = fit.map_or(false, |f| f.q >= 1.05);
        SummabilityVerdict {
            name: names[k],
            partial_half: half[k],
            partial_full: sums[k],
            tail_estimate: fit.map(|f| f.remainder),
            summable: n_eff >= 100 && (saturated || by_fit),
        }
    });

    let carleman_partial_sum: f64 = (1..=n_eff).map(|n| 1.0 / seq.a(n)).sum();
    let inv: Vec<(f64, f64)> = window
        .iter()
        .map(|&n| ((n as f64).ln(), -seq.a(n).ln()))
        .collect();
    let carleman_diverges = inv.len() >= 2 && -least_squares(&inv).0 <= 1.02;
    if !carleman_diverges {
        warnings.push("Carleman sum appears to converge; determinacy not guaranteed".into());
    }

    let ratio_ok = (ratio_limit_estimate - 1.0).abs() <= cfg.tol.max(1e-12);
    let hypotheses_hold = n_eff >= 100 && a_unbounded && ratio_ok && verdicts.iter().all(|v| v.summable);
    if !a_unbounded {
        warnings.push("a(n) does not appear to grow without bound".into());
    }
    if !ratio_ok {
        warnings.push(format!("a(n)/a(n+1) tends to {ratio_limit_estimate}, not 1"));
    }

    let regime = if !d_estimate.is_finite() || n_eff < 100 {
        Regime::Unknown
    } else if (d_estimate.abs() - 1.0).abs() < cfg.exclusion {
        Regime::Excluded
    } else if !hypotheses_hold {
        Regime::Unknown
    } else if d_estimate.abs() < 1.0 {
        Regime::Ac
    } else {
        Regime::Discrete
    };

    HypothesisReport {
        n_effective: n_eff,
        d_estimate,
        ratio_limit_estimate,
        a_unbounded,
        epsilon_partial_sums: eps_sums,
        summability_verdicts: verdicts,
        carleman_partial_sum,
        carleman_diverges,
        hypotheses_hold,
        regime,
        warnings,
    }
}
