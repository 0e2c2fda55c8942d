//! Working with scenario files programmatically: generate a random scenario,
//! save it, load it back and resolve it into a runnable setup.
//!
//! ```bash
//! cargo run --example scenario_files
//! ```

use group_consensus::generator::{self, EepGraphParams};
use group_consensus::report::sig12;
use group_consensus::scenario::{
    CouplingSpec, DeltaMode, DeltaSpec, DynamicsSpec, EdgeSpec, ScenarioFile, SimSpec,
};
use group_consensus::simulate;

fn main() -> group_consensus::Result<()> {
    let params = EepGraphParams {
        cluster_sizes: vec![2, 3, 2],
        intra_density: 0.7,
        inter_density: 0.6,
        weight_range: (0.2, 2.0),
    };
    let graph = generator::random_eep_graph(&params, 99)?;

    let mut clusters = Vec::new();
    for ci in 0..graph.cluster_count() {
        clusters.push(graph.cluster_range(ci).map(|i| graph.external_id(i)).collect());
    }
    let mut edges = Vec::new();
    for to in 0..graph.agent_count() {
        for from in 0..graph.agent_count() {
            let w = graph.weight(to, from);
            if w > 0.0 {
                edges.push(EdgeSpec {
                    from: graph.external_id(from),
                    to: graph.external_id(to),
                    weight: w,
                });
            }
        }
    }

    let file = ScenarioFile {
        agents: graph.agent_count(),
        clusters,
        edges,
        dynamics: DynamicsSpec {
            a: vec![vec![0.0, 1.0], vec![-1.0, 0.0]],
            b: vec![vec![0.0], vec![1.0]],
            q: None,
        },
        coupling: CouplingSpec {
            delta: DeltaSpec::Mode(DeltaMode::AutoPattern),
        },
        sim: SimSpec {
            t_final: 120.0,
            dt: 0.01,
            integrator: "expm".into(),
            seed: Some(99),
            x0: None,
        },
    };

    let dir = std::env::temp_dir().join("gcl-scenario-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("random.json");
    file.save(&path)?;
    println!("saved {}", path.display());

    let loaded = ScenarioFile::load(&path)?;
    assert_eq!(loaded, file);
    println!("round trip: identical");

    // Resolve with an explicit coupling strength and peek at the verdict.
    let verdict = simulate::group_consensus_verdict(&loaded.graph()?);
    println!(
        "feasible: {} (m = {} vs quotient {})",
        verdict.feasible, verdict.forest_size_full, verdict.forest_size_quotient
    );
    let scenario = loaded.resolve(1.0)?;
    println!(
        "resolved: {} agents, horizon {}, dt {}",
        scenario.graph.agent_count(),
        sig12(scenario.t_final),
        sig12(scenario.dt)
    );

    Ok(())
}
