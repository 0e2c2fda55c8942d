//! Decide group consensusability of a clustered digraph.
//!
//! Builds a 4-agent, 2-cluster graph, checks the inter-cluster common
//! influence condition, compares the spanning-forest sizes of the graph and
//! its quotient and prints the full analysis report.
//!
//! ```bash
//! cargo run --example analyze_topology
//! ```

use nalgebra::DMatrix;

use group_consensus::control::Dynamics;
use group_consensus::graph::{ClusteredDigraph, Edge};
use group_consensus::report;

fn main() -> group_consensus::Result<()> {
    // Two clusters of two agents; cluster 1 drives cluster 2 with equal
    // per-node weight 0.5, which keeps the common influence condition.
    let graph = ClusteredDigraph::new(
        4,
        &[vec![1, 2], vec![3, 4]],
        &[
            Edge::new(2, 1, 1.0),
            Edge::new(1, 2, 1.0),
            Edge::new(4, 3, 1.0),
            Edge::new(3, 4, 1.0),
            Edge::new(1, 3, 0.5),
            Edge::new(2, 4, 0.5),
        ],
    )?;

    // Harmonic oscillators coupled through the input channel.
    let dynamics = Dynamics::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
    )?;

    let analysis = report::analyze(&graph, &dynamics)?;
    print!("{}", analysis.to_text());

    Ok(())
}
