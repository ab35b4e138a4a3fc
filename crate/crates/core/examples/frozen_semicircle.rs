//! Frozen-coefficient systems: a semicircle band plus finitely many atoms.

use jacobi_spectra::measures::{FrozenSystem, FROZEN_RULE_NODES};
use jacobi_spectra::{CoefficientSequence, Result};

fn main() -> Result<()> {
    let hermite = CoefficientSequence::hermite();
    let shifted = CoefficientSequence::power_law(1.0, 1.0, 0.0, 4.0, 0.0)?;
    for (seq, n0) in [(&hermite, 1), (&hermite, 8), (&shifted, 3)] {
        let system = FrozenSystem::new(seq, n0)?;
        let (lo, hi) = system.band();
        let ac: f64 = system.ac_rule(FROZEN_RULE_NODES).iter().map(|(_, w)| w).sum();
        let atoms = system.point_masses()?;
        let atom_mass = atoms.iter().fold(0.0, |acc, (_, m)| acc + m);
        println!("{} at n0 = {n0}:", seq.label());
        println!("    band [{lo:.4}, {hi:.4}], ac mass {ac:.10}, {} atoms of mass {atom_mass:.10}", atoms.len());
        for (x, m) in atoms {
            println!("    atom at {x:+.8} mass {m:.3e}");
        }
    }

    // Free case: the density is exactly the semicircle sqrt(4 - x^2) / (2 pi).
    let free = CoefficientSequence::constant(1.0, 0.0)?;
    let system = FrozenSystem::new(&free, 1)?;
    for x in [-1.5f64, 0.0, 1.0] {
        let exact = (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI);
        println!("semicircle x = {x:+.1}: {:.12} vs {exact:.12}", system.density(x));
    }
    Ok(())
}
