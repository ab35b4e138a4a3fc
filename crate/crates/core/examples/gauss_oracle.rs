//! Gauss quadrature from truncated matrices, used as an independent oracle.

use jacobi_spectra::oracles::{gauss_rule, interlacing_check, truncation_moments};
use jacobi_spectra::{CoefficientSequence, Result};

fn main() -> Result<()> {
    let seq = CoefficientSequence::hermite();
    let rule = gauss_rule(&seq, 20)?;
    let moments = truncation_moments(&seq, 8, 20, 1.0);
    for k in [0, 2, 4, 6, 8] {
        let quad = rule.integrate(|x| x.powi(k as i32));
        println!("moment {k}: quadrature {quad:.12}  matrix {:.12}", moments[k]);
    }
    println!("interlacing up to N = 50: {}", interlacing_check(&seq, 50)?);
    print!("{}", gauss_rule(&seq, 5)?.to_csv());
    Ok(())
}
