//! The half-plane map and the transfer factors along a sequence.

use jacobi_spectra::maps::{band_cutoff, rho, transfer};
use jacobi_spectra::{CoefficientSequence, Result};
use num_complex::Complex64;

fn main() -> Result<()> {
    for z in [Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.0), Complex64::new(3.0, 0.0), Complex64::new(-3.0, 0.0)] {
        let r = rho(z);
        println!("rho({z}) = {r:.6}  |rho| = {:.6}  (r + 1/r)/2 = {:.6}", r.norm(), (r + 1.0 / r) / 2.0);
    }
    let seq = CoefficientSequence::hermite();
    let x = Complex64::new(1.0, 0.0);
    println!("band cutoff at x = 1: {:?}", band_cutoff(&seq, 1.0, 1 << 16));
    for n in [1, 2, 3, 10, 100] {
        let t = transfer(&seq, n, x);
        println!("n = {n:>3}: z = {:.4}  t1 = {:.6}  |t1| = {:.6}", t.z, t.t1, t.t1.norm());
    }
    Ok(())
}
