//! Classify a few coefficient families and print the hypothesis report.

use jacobi_spectra::{check_hypotheses, preset, Params, Result};

fn main() -> Result<()> {
    let cases: [(&str, &[(&str, f64)]); 4] = [
        ("hermite", &[]),
        ("power_law", &[("alpha", 1.0), ("p", 1.0), ("gamma", 4.0)]),
        ("linear_shift", &[("alpha", 1.0), ("gamma", 2.0), ("delta", 1.0)]),
        ("constant", &[("a", 1.0)]),
    ];
    for (name, kv) in cases {
        let params: Params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let seq = preset(name, &params)?;
        let report = check_hypotheses(&seq, 4096, 1e-3)?;
        println!(
            "{:<32} d = {:+.4}  regime = {:?}  hypotheses hold = {}",
            seq.label(),
            report.d_estimate,
            report.regime,
            report.hypotheses_hold
        );
        for w in &report.warnings {
            println!("    {w}");
        }
    }
    Ok(())
}
