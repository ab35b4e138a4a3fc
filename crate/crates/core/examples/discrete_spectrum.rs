//! Eigenvalues and masses for a_n = n, b_n = 4n, compared with a Gauss rule.

use jacobi_spectra::measures::{discrete_spectrum, seeded_interval, DiscreteOptions};
use jacobi_spectra::oracles::gauss_rule;
use jacobi_spectra::{CoefficientSequence, Result};

fn main() -> Result<()> {
    let seq = CoefficientSequence::power_law(1.0, 1.0, 0.0, 4.0, 0.0)?;
    let opts = DiscreteOptions::default();
    let (lo, hi) = seeded_interval(&seq, 10, opts.truncation)?;
    let points = discrete_spectrum(&seq, lo, hi, &opts)?;
    let gauss = gauss_rule(&seq, opts.truncation)?;
    println!("{:>20} {:>20} {:>10}", "x", "mass", "gauss dev");
    for (p, w) in points.iter().zip(&gauss.weights) {
        println!("{:>20.14} {:>20.14e} {:>10.1e}", p.x, p.mass, (p.mass / w - 1.0).abs());
    }
    let total: f64 = points.iter().map(|p| p.mass).sum();
    println!("captured mass {total:.12}");
    Ok(())
}
