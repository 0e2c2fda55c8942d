//! Synthesize the coupling gain K = B'P from the algebraic Riccati equation
//! and inspect the closed-loop stability margins it buys.
//!
//! ```bash
//! cargo run --example riccati_gain
//! ```

use nalgebra::DMatrix;

use group_consensus::control::{self, Dynamics};
use group_consensus::report::sig12;
use group_consensus::spectral::{self, C64, Spectrum};

fn main() -> group_consensus::Result<()> {
    let dynamics = Dynamics::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
    )?;

    let (p, residual) = control::solve_riccati(&dynamics)?;
    let k = control::gain(&p, dynamics.b())?;

    println!("P =");
    for r in 0..2 {
        println!("  [{}, {}]", sig12(p[(r, 0)]), sig12(p[(r, 1)]));
    }
    println!("K = B'P = [{}, {}]", sig12(k[(0, 0)]), sig12(k[(0, 1)]));
    println!("Riccati residual (Frobenius): {}", sig12(residual));

    // How the gain stabilizes A - delta * lambda * BK across eigenvalues of
    // a reduced Laplacian: sweep a few representative values.
    println!();
    println!("{:<22} {:>12} {:>10}", "lambda", "delta", "margin");
    for lambda in [C64::new(2.0, 0.0), C64::new(0.5, 1.5), C64::new(1.0, -3.0)] {
        let spectrum = Spectrum::from_values(vec![lambda], 1e-8);
        for delta in [0.25, 1.0] {
            let (hurwitz, margin) =
                spectral::hurwitz_check(dynamics.a(), dynamics.b(), &k, delta, &spectrum)?;
            println!(
                "{:<22} {:>12} {:>10} {}",
                format!(
                    "{}{}{}i",
                    lambda.re,
                    if lambda.im >= 0.0 { "+" } else { "-" },
                    lambda.im.abs()
                ),
                delta,
                format!("{:.4}", margin),
                if hurwitz { "stable" } else { "NOT stable" }
            );
        }
    }

    // The Lyapunov chain from the sufficiency proof: at delta >= 1/(2 Re
    // lambda) the Hermitian part of (A - delta lambda BK)*P + P(...) + Q
    // stays negative semidefinite.
    let spectrum = Spectrum::from_values(vec![C64::new(2.0, 0.0), C64::new(2.5, 0.0)], 1e-8);
    let excess = control::lyapunov_chain_excess(&dynamics, &p, &k, 0.25, &spectrum)?;
    println!();
    println!(
        "Lyapunov excess at delta = 0.25 over sigma = {{2, 2.5}}: {}",
        sig12(excess)
    );

    Ok(())
}
