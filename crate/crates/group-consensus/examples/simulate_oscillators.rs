//! End-to-end closed-loop run on the 10-agent, 5-cluster oscillator
//! benchmark: analyze, synthesize the coupling, integrate, verify the
//! predicted pattern and emit a plot-ready CSV.
//!
//! ```bash
//! cargo run --example simulate_oscillators
//! # then e.g.:  python3 -c "import pandas as pd, matplotlib.pyplot as plt; \
//! #   d = pd.read_csv('gcl-out/trajectory.csv'); \
//! #   [plt.plot(d['t'], d[c]) for c in d.columns if c.endswith('_1')]; plt.show()"
//! ```

use std::path::Path;

use group_consensus::control;
use group_consensus::generator;
use group_consensus::report::{self, sig12};
use group_consensus::scenario::ScenarioFile;
use group_consensus::simulate::{self, Integrator, Scenario};

fn main() -> group_consensus::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/oscillator10.json");
    let file = ScenarioFile::load(Path::new(path))?;
    let graph = file.graph()?;
    let dynamics = file.dynamics()?;

    let design = control::design(&graph, &dynamics)?;
    println!(
        "gain K = [{}, {}]",
        sig12(design.k[(0, 0)]),
        sig12(design.k[(0, 1)])
    );
    println!(
        "thresholds: delta_group = {}, delta_pattern = {}",
        sig12(design.thresholds.delta_group),
        sig12(design.thresholds.delta_pattern)
    );

    let mut rng = generator::rng_for_seed(file.sim.seed.unwrap_or(0));
    let x0 = generator::standard_normal_vector(&mut rng, dynamics.state_dim() * graph.agent_count());
    let scenario = Scenario {
        graph: graph.clone(),
        dynamics: dynamics.clone(),
        delta: design.thresholds.delta_pattern,
        x0,
        t_final: 200.0,
        dt: 0.01,
        integrator: Integrator::MatrixExponential,
    };

    let trajectory = simulate::simulate(&scenario, &design.k)?;
    println!(
        "D(0) = {}, D({}) = {}",
        sig12(trajectory.disagreement[0]),
        sig12(scenario.t_final),
        sig12(trajectory.final_disagreement())
    );

    let prediction = simulate::predict_limit(&graph, &dynamics, &scenario.x0)?;
    let verification = simulate::verify_prediction(
        &trajectory,
        &prediction,
        scenario.delta,
        design.thresholds.delta_pattern,
        simulate::PREDICTION_TOLERANCE,
    )?;
    println!(
        "pattern tail deviation: {} (tolerance {}) -> {}",
        verification
            .tail_max_deviation
            .map(sig12)
            .unwrap_or_else(|| "n/a".into()),
        sig12(verification.tolerance),
        match verification.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "not applicable",
        }
    );

    std::fs::create_dir_all("gcl-out")?;
    let csv = Path::new("gcl-out/trajectory.csv");
    let rows = report::write_trajectory_csv(csv, &graph, &trajectory)?;
    println!("wrote {} ({} rows)", csv.display(), rows);

    Ok(())
}
