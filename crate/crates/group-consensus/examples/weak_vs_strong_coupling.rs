//! The two coupling regimes side by side.
//!
//! At delta >= delta_pattern the clusters not only consense internally but
//! arrange into the predicted pattern: exclusive parts merge and the common
//! part enters their convex hull. Between delta_group and delta_pattern,
//! group consensus still holds but the pattern is not claimed and generally
//! does not appear.
//!
//! ```bash
//! cargo run --example weak_vs_strong_coupling
//! ```

use std::path::Path;

use group_consensus::control;
use group_consensus::generator;
use group_consensus::report::sig12;
use group_consensus::scenario::ScenarioFile;
use group_consensus::simulate::{self, Integrator, Scenario};

fn main() -> group_consensus::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/oscillator10.json");
    let file = ScenarioFile::load(Path::new(path))?;
    let graph = file.graph()?;
    let dynamics = file.dynamics()?;
    let design = control::design(&graph, &dynamics)?;

    let mut rng = generator::rng_for_seed(2024);
    let x0 = generator::standard_normal_vector(&mut rng, dynamics.state_dim() * graph.agent_count());
    let prediction = simulate::predict_limit(&graph, &dynamics, &x0)?;

    println!(
        "delta_group = {}, delta_pattern = {}",
        sig12(design.thresholds.delta_group),
        sig12(design.thresholds.delta_pattern)
    );
    println!();
    println!(
        "{:<26} {:>14} {:>16} {:>12}",
        "regime", "delta", "D(200)", "pattern"
    );

    for (label, delta) in [
        ("group threshold", design.thresholds.delta_group),
        ("pattern threshold", design.thresholds.delta_pattern),
    ] {
        let scenario = Scenario {
            graph: graph.clone(),
            dynamics: dynamics.clone(),
            delta,
            x0: x0.clone(),
            t_final: 200.0,
            dt: 0.01,
            integrator: Integrator::MatrixExponential,
        };
        let trajectory = simulate::simulate(&scenario, &design.k)?;
        let verification = simulate::verify_prediction(
            &trajectory,
            &prediction,
            delta,
            design.thresholds.delta_pattern,
            simulate::PREDICTION_TOLERANCE,
        )?;
        let pattern = if !verification.applicable {
            "not applicable".to_string()
        } else {
            format!(
                "{} ({})",
                match verification.pass {
                    Some(true) => "PASS",
                    _ => "FAIL",
                },
                verification
                    .tail_max_deviation
                    .map(sig12)
                    .unwrap_or_default()
            )
        };
        println!(
            "{:<26} {:>14} {:>16} {:>12}",
            label,
            sig12(delta),
            sig12(trajectory.final_disagreement()),
            pattern
        );
    }

    Ok(())
}
