//! Residuals of the large-n formulas in and off the band.

use jacobi_spectra::asymptotics::{
    check_band_asymptotic_series, check_offband_asymptotic_series, decay_ratios, median, powers_of_two,
    AsymptoticOptions,
};
use jacobi_spectra::{CoefficientSequence, Result};
use num_complex::Complex64;

fn main() -> Result<()> {
    let seq = CoefficientSequence::hermite();
    let ns = powers_of_two(7, 13);
    let opts = AsymptoticOptions::default();

    let band = check_band_asymptotic_series(&seq, 0.0, &ns, &opts)?;
    let off = check_offband_asymptotic_series(&seq, Complex64::new(0.0, 1.0), &ns, &opts)?;
    for (name, reports) in [("band x = 0", &band), ("off-band x = i", &off)] {
        println!("{name}");
        for r in reports.iter() {
            println!("    n = {:>5}  residual {:.3e}  predicted tail {:.3e}", r.n, r.residual, r.predicted_tail);
        }
        println!("    median decay ratio {:.3}", median(&decay_ratios(reports)).unwrap_or(f64::NAN));
    }
    Ok(())
}
