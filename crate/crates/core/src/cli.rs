//! Command-line front end. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 regime error,
//! 3 non-convergence or a failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::asymptotics::{
    check_band_asymptotic_series, check_offband_asymptotic_series, to_json_lines, AsymptoticOptions,
};
use crate::coeffs::{check_hypotheses, CoefficientSequence, Params, Regime, SequenceSpec, DEFAULT_HYPOTHESIS_N};
use crate::error::{Error, Result};
use crate::measures::{
    ac_measure, discrete_measure, frozen_measure, seeded_interval, uniform_grid, weak_convergence_check,
    DensityOptions, DiscreteOptions, FrozenSystem,
};
use crate::oracles::orthonormality_check;

pub const THREADS_ENV: &str = "JACOBI_SPECTRA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "jacobi-spectra", version, about = "Spectral measures of Jacobi matrices with unbounded coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hypothesis report and regime classification (JSON).
    Hypotheses(RunArgs),
    /// Density table `x, mu'(x)` over a grid (CSV).
    Density(RunArgs),
    /// Point spectrum and masses (CSV).
    Spectrum(RunArgs),
    /// Measure of the frozen-coefficient system (JSON).
    Frozen(RunArgs),
    /// Residuals of the large-n asymptotic formulas (JSON lines).
    Asymptotics(RunArgs),
    /// Orthonormality, total mass and moment checks (JSON).
    Verify(RunArgs),
}

/// Flags shared by every subcommand; each one reads what it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Named family: hermite, power_law, linear_shift, constant.
    #[arg(long)]
    pub preset: Option<String>,
    /// Preset parameters, `k=v,k=v` (Greek keys accepted).
    #[arg(long)]
    pub params: Option<String>,
    /// Sequence as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub sequence: Option<String>,
    /// Full run configuration; command-line flags take precedence.
    #[arg(long = "json-config")]
    pub json_config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 = automatic.
    #[arg(long)]
    pub threads: Option<usize>,
    /// `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Recurrence depth, hypothesis sample size, largest asymptotic index or
    /// orthonormality degree, depending on the command.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Smallest asymptotic index.
    #[arg(long)]
    pub nmin: Option<usize>,
    /// Freezing index.
    #[arg(long)]
    pub n0: Option<usize>,
    /// Search interval `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Evaluation point `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
}

/// Everything a run depends on; a run is reproducible from this alone.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sequence: Option<SequenceSpec>,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub nmax: Option<usize>,
    pub nmin: Option<usize>,
    pub n0: Option<usize>,
    pub interval: Option<String>,
    pub x: Option<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Load `--json-config` (if any) and lay the explicit flags over it.
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let mut cfg = match &args.json_config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(text) = &args.sequence {
            let body = if text.trim_start().starts_with('{') {
                text.clone()
            } else {
                std::fs::read_to_string(text)?
            };
            cfg.sequence = Some(SequenceSpec::from_json(&body)?);
        } else if let Some(name) = &args.preset {
            let params = match &args.params {
                Some(p) => parse_params(p)?,
                None => Params::new(),
            };
            cfg.sequence = Some(SequenceSpec::Preset {
                preset: name.clone(),
                params,
            });
        } else if args.params.is_some() {
            return Err(Error::InvalidArgument("--params needs --preset".into()));
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if args.$f.is_some() { cfg.$f = args.$f.clone(); } )* };
        }
        take!(grid, tol, nmax, nmin, n0, interval, x, out, threads);
        Ok(cfg)
    }

    pub fn build_sequence(&self) -> Result<CoefficientSequence> {
        self.sequence
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("no sequence given (use --preset, --sequence or --json-config)".into()))?
            .build()
    }
}

/// `alpha=1,p=1` into a parameter map.
pub fn parse_params(text: &str) -> Result<Params> {
    let mut out = Params::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::InvalidParameter {
            name: item.to_string(),
            reason: "expected key=value".into(),
        })?;
        let value: f64 = v.trim().parse().map_err(|_| Error::InvalidParameter {
            name: k.trim().to_string(),
            reason: format!("`{}` is not a number", v.trim()),
        })?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

fn parse_floats(text: &str, sep: char, count: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(sep).collect();
    if parts.len() != count {
        return Err(Error::InvalidArgument(format!("{what} `{text}` needs {count} fields")));
    }
    parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number `{p}` in {what}"))))
        .collect()
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let v = parse_floats(text, ':', 3, "grid")?;
    uniform_grid(v[0], v[1], v[2])
}

pub fn parse_interval(text: &str) -> Result<(f64, f64)> {
    let v = parse_floats(text, ':', 2, "interval")?;
    Ok((v[0], v[1]))
}

pub fn parse_point(text: &str) -> Result<Complex64> {
    match text.split(',').count() {
        1 => Ok(Complex64::new(parse_floats(text, ',', 1, "point")?[0], 0.0)),
        _ => {
            let v = parse_floats(text, ',', 2, "point")?;
            Ok(Complex64::new(v[0], v[1]))
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::RegimeMismatch { .. }
        | Error::XInBand { .. }
        | Error::XOutsideBand { .. }
        | Error::XTooCloseToSpectrum { .. }
        | Error::DoubleRootSuspected { .. }
        | Error::NegativeMass { .. } => 2,
        Error::ScaleOutOfRange { .. } | Error::EigenNoConvergence { .. } | Error::GridTooCoarse { .. } => 3,
        _ => 1,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::UnknownPreset(_) => "UNKNOWN_PRESET",
        Error::InvalidParameter { .. } => "INVALID_PARAMETER",
        Error::NonPositiveCoefficient { .. } => "NON_POSITIVE_COEFFICIENT",
        Error::MissingContinuation => "MISSING_CONTINUATION",
        Error::BadTable(_) => "BAD_TABLE",
        Error::ScaleOutOfRange { .. } => "SCALE_OUT_OF_RANGE",
        Error::RegimeMismatch { .. } => "REGIME_MISMATCH",
        Error::XInBand { .. } => "X_IN_BAND",
        Error::XOutsideBand { .. } => "X_OUTSIDE_BAND",
        Error::XTooCloseToSpectrum { .. } => "X_TOO_CLOSE_TO_SPECTRUM",
        Error::DoubleRootSuspected { .. } => "DOUBLE_ROOT_SUSPECTED",
        Error::NegativeMass { .. } => "NEGATIVE_MASS",
        Error::TruncationTooSmall { .. } => "TRUNCATION_TOO_SMALL",
        Error::EigenNoConvergence { .. } => "EIGEN_NO_CONVERGENCE",
        Error::GridTooCoarse { .. } => "GRID_TOO_COARSE",
        Error::UnsupportedWeight(_) => "UNSUPPORTED_WEIGHT",
        Error::InvalidArgument(_) => "INVALID_ARGUMENT",
        Error::Json(_) => "JSON",
        Error::Io(_) => "IO",
    }
}

/// Output text plus the exit code it should end with.
struct Outcome {
    text: String,
    code: i32,
}

fn ok(text: String) -> Result<Outcome> {
    Ok(Outcome { text, code: 0 })
}

fn threads(cfg: &RunConfig) -> usize {
    cfg.threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or(0)
}

/// Parse `args` (program name first), run, write output and return the
/// exit code. Diagnostics go to `stderr` as one JSON object.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let target: &mut dyn Write = if shown { stdout } else { stderr };
            let _ = write!(target, "{}", e.render());
            return if shown { 0 } else { 1 };
        }
    };
    let (name, args) = match &cli.command {
        Command::Hypotheses(a) => ("hypotheses", a),
        Command::Density(a) => ("density", a),
        Command::Spectrum(a) => ("spectrum", a),
        Command::Frozen(a) => ("frozen", a),
        Command::Asymptotics(a) => ("asymptotics", a),
        Command::Verify(a) => ("verify", a),
    };
    let result = RunConfig::from_args(args).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads(&cfg))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        let outcome = pool.install(|| dispatch(name, &cfg))?;
        match &cfg.out {
            Some(path) => std::fs::write(path, &outcome.text)?,
            None => stdout.write_all(outcome.text.as_bytes())?,
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let diag = json!({"error": error_kind(&e), "message": e.to_string()});
            let _ = writeln!(stderr, "{diag}");
            exit_code(&e)
        }
    }
}

fn dispatch(name: &str, cfg: &RunConfig) -> Result<Outcome> {
    let seq = cfg.build_sequence()?;
    match name {
        "hypotheses" => cmd_hypotheses(&seq, cfg),
        "density" => cmd_density(&seq, cfg),
        "spectrum" => cmd_spectrum(&seq, cfg),
        "frozen" => cmd_frozen(&seq, cfg),
        "asymptotics" => cmd_asymptotics(&seq, cfg),
        "verify" => cmd_verify(&seq, cfg),
        _ => unreachable!("subcommand list is closed"),
    }
}

fn cmd_hypotheses(seq: &CoefficientSequence, cfg: &RunConfig) -> Result<Outcome> {
    let report = check_hypotheses(seq, cfg.nmax.unwrap_or(DEFAULT_HYPOTHESIS_N), cfg.tol.unwrap_or(1e-3))?;
    let code = match report.regime {
        Regime::Ac | Regime::Discrete => 0,
        Regime::Excluded | Regime::Unknown => 2,
    };
    Ok(Outcome {
        text: serde_json::to_string_pretty(&report)? + "\n",
        code,
    })
}

fn density_options(cfg: &RunConfig) -> DensityOptions {
    let d = DensityOptions::default();
    DensityOptions {
        tol: cfg.tol.unwrap_or(d.tol),
        n_max: cfg.nmax.unwrap_or(d.n_max),
        richardson: true,
    }
}

fn cmd_density(seq: &CoefficientSequence, cfg: &RunConfig) -> Result<Outcome> {
    let grid = parse_grid(cfg.grid.as_deref().unwrap_or("-4:4:0.05"))?;
    let (measure, values) = ac_measure(seq, &grid, &density_options(cfg))?;
    let code = if values.iter().all(|v| v.converged) { 0 } else { 3 };
    Ok(Outcome {
        text: measure.to_csv(),
        code,
    })
}

fn discrete_options(cfg: &RunConfig) -> DiscreteOptions {
    let d = DiscreteOptions::default();
    DiscreteOptions {
        tol: cfg.tol.unwrap_or(d.tol),
        depth: cfg.nmax.unwrap_or(d.depth),
        ..d
    }
}

fn spectrum_interval(seq: &CoefficientSequence, cfg: &RunConfig, opts: &DiscreteOptions) -> Result<(f64, f64)> {
    match &cfg.interval {
        Some(text) => parse_interval(text),
        None => seeded_interval(seq, 10, opts.truncation),
    }
}

fn cmd_spectrum(seq: &CoefficientSequence, cfg: &RunConfig) -> Result<Outcome> {
    let opts = discrete_options(cfg);
    let (lo, hi) = spectrum_interval(seq, cfg, &opts)?;
    ok(discrete_measure(seq, lo, hi, &opts)?.to_csv())
}

fn cmd_frozen(seq: &CoefficientSequence, cfg: &RunConfig) -> Result<Outcome> {
    let n0 = cfg.n0.ok_or_else(|| Error::InvalidArgument("frozen needs --n0".into()))?;
    let system = FrozenSystem::new(seq, n0)?;
    let grid = match &cfg.grid {
        Some(text) => parse_grid(text)?,
        None => {
            let (lo, hi) = system.band();
            uniform_grid(lo, hi, (hi - lo) / 400.0)?
        }
    };
    ok(frozen_measure(seq, n0, &grid)?.to_json()? + "\n")
}

fn cmd_asymptotics(seq: &CoefficientSequence, cfg: &RunConfig) -> Result<Outcome> {
    let x = parse_point(cfg.x.as_deref().unwrap_or("0"))?;
    let lo = cfg.nmin.unwrap_or(128).max(1);
    let hi = cfg.nmax.unwrap_or(8192).max(lo);
    let mut ns = vec![lo];
    while ns.last().unwrap() * 2 <= hi {
        ns.push(ns.last().unwrap() * 2);
    }
    let opts = AsymptoticOptions::default();
    let reports = if x.im == 0.0 && seq.hypotheses().d_estimate.abs() < 1.0 {
        check_band_asymptotic_series(seq, x.re, &ns, &opts)?
    } else {
        check_offband_asymptotic_series(seq, x, &ns, &opts)?
    };
    ok(to_json_lines(&reports)?)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    pass: bool,
}

fn check(name: &'static str, value: f64, limit: f64) -> Check {
    Check {
        name,
        value,
        limit,
        pass: value <= limit,
    }
}

fn cmd_verify(seq: &CoefficientSequence, cfg: &RunConfig) -> Result<Outcome> {
    let degree = cfg.nmax.unwrap_or(8);
    let mut checks = Vec::new();
    let measure = if seq.hypotheses().d_estimate.abs() < 1.0 {
        let grid = parse_grid(cfg.grid.as_deref().unwrap_or("-8:8:0.02"))?;
        let opts = DensityOptions {
            n_max: DensityOptions::default().n_max,
            ..density_options(&RunConfig { nmax: None, ..cfg.clone() })
        };
        let (m, _) = ac_measure(seq, &grid, &opts)?;
        checks.push(check("total_mass", (m.total_mass() - 1.0).abs(), 1e-3));
        m
    } else {
        let opts = discrete_options(&RunConfig { nmax: None, ..cfg.clone() });
        let (lo, hi) = spectrum_interval(seq, cfg, &opts)?;
        let m = discrete_measure(seq, lo, hi, &opts)?;
        let mass = m.total_mass();
        checks.push(check("total_mass_deficit", (1.0 - mass).max(0.0), 1e-3));
        checks.push(check("total_mass_excess", (mass - 1.0).max(0.0), 1e-6));
        m
    };
    let orth = orthonormality_check(seq, &measure, degree)?;
    checks.push(check("orthonormality", orth.max_error, 1e-2));
    let weak = weak_convergence_check(seq, &[3, 5, 8], 16)?;
    checks.push(check("frozen_moments", weak.max_deviation, 1e-7));

    let pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "sequence": seq.label(),
        "verdict": if pass { "PASS" } else { "FAIL" },
        "checks": checks,
    });
    Ok(Outcome {
        text: serde_json::to_string_pretty(&report)? + "\n",
        code: if pass { 0 } else { 3 },
    })
}
