//! Density of the Hermite spectral measure against the exact weight.

use jacobi_spectra::measures::{ac_measure, uniform_grid, DensityOptions};
use jacobi_spectra::oracles::classical_weight;
use jacobi_spectra::{CoefficientSequence, Result};

fn main() -> Result<()> {
    let seq = CoefficientSequence::hermite();
    let grid = uniform_grid(-3.0, 3.0, 0.5)?;
    let (measure, values) = ac_measure(&seq, &grid, &DensityOptions::default())?;
    println!("{:>6} {:>14} {:>14} {:>10} {:>8}", "x", "density", "exact", "rel err", "n");
    for v in &values {
        let exact = classical_weight("hermite", v.x)?;
        println!(
            "{:>6.2} {:>14.8e} {:>14.8e} {:>10.2e} {:>8}",
            v.x,
            v.density,
            exact,
            (v.density / exact - 1.0).abs(),
            v.n_used
        );
    }
    println!("mass on [-3, 3]: {:.6}", measure.total_mass());
    Ok(())
}
