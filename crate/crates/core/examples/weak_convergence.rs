//! Moments of frozen measures against those of the full Jacobi matrix.

use jacobi_spectra::measures::{moments_jacobi, weak_convergence_check, FrozenSystem, FROZEN_RULE_NODES};
use jacobi_spectra::{CoefficientSequence, Result};

fn main() -> Result<()> {
    let seq = CoefficientSequence::hermite();
    let report = weak_convergence_check(&seq, &[2, 3, 5, 8], 16)?;
    for row in &report.rows {
        println!("n0 = {:>2}, k <= {:>2}: max relative deviation {:.2e}", row.n0, row.k_max, row.max_deviation);
    }
    // Past k = 2 n0 the frozen moments drift away.
    let frozen = FrozenSystem::new(&seq, 3)?.moments(10, FROZEN_RULE_NODES)?.0;
    for k in [6, 8, 10] {
        println!("n0 = 3, k = {k:>2}: frozen {:.6}  exact {:.6}", frozen[k], moments_jacobi(&seq, k, k + 2)?);
    }
    Ok(())
}
