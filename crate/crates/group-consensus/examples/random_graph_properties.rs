//! A taste of the verification suites: generate seeded random graphs that
//! satisfy the common influence condition by construction, then confirm the
//! graph-theoretic and spectral characterizations agree on each one.
//!
//! The full batch lives in `gcl verify --seeds N`.
//!
//! ```bash
//! cargo run --example random_graph_properties
//! ```

use group_consensus::generator::{self};
use group_consensus::quotient;
use group_consensus::reduction;
use group_consensus::spectral;

fn main() -> group_consensus::Result<()> {
    println!(
        "{:>5} {:>7} {:>9} {:>6} {:>6} {:>7} {:>9} {:>14}",
        "seed", "agents", "clusters", "m(G)", "m(Q)", "trees", "zero(L)", "split error"
    );

    for seed in 0..12u64 {
        let params = generator::corpus_params(seed);
        let graph = generator::random_eep_graph(&params, seed)?;
        let quotient_graph = quotient::quotient_graph(&graph);

        let m_graph = graph.min_spanning_forest_size();
        let m_quotient = quotient_graph.min_spanning_forest_size();
        let trees = graph.cluster_spanning_trees().satisfied;
        let spectrum = spectral::eigenvalues(graph.laplacian().matrix())?;
        let reduction_report = reduction::reduced_laplacian(&graph)?;

        // Feasibility criteria agree: equal forests <=> cluster trees.
        assert_eq!(m_graph == m_quotient, trees);
        // Zero eigenvalues count the spanning forest.
        assert_eq!(spectrum.zero_eig_count(), m_graph);

        println!(
            "{:>5} {:>7} {:>9} {:>6} {:>6} {:>7} {:>9} {:>14.3e}",
            seed,
            graph.agent_count(),
            graph.cluster_count(),
            m_graph,
            m_quotient,
            trees,
            spectrum.zero_eig_count(),
            reduction_report.spectrum_split.max_pairing_error
        );
    }

    println!();
    println!("all checks passed");
    Ok(())
}
