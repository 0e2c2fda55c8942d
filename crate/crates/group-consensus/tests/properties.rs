//! Property-based invariants over seeded random graphs.

use proptest::prelude::*;

use group_consensus::control;
use group_consensus::generator::{self};
use group_consensus::graph::ClusteredDigraph;
use group_consensus::quotient;
use group_consensus::scenario::{
    CouplingSpec, DeltaMode, DeltaSpec, DynamicsSpec, EdgeSpec, ScenarioFile, SimSpec,
};

fn corpus_graph(seed: u64) -> ClusteredDigraph {
    let params = generator::corpus_params(seed);
    generator::random_eep_graph(&params, seed).expect("corpus generation")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adding an edge never shrinks any reachable set.
    #[test]
    fn reachability_is_monotone(seed in 0u64..5000, pick in 0usize..64, start in 0usize..64) {
        let g = corpus_graph(seed);
        let n = g.agent_count();
        prop_assume!(n >= 2);

        // pick a currently absent edge
        let mut absent = Vec::new();
        for l in 0..n {
            for k in 0..n {
                if l != k && g.weight(l, k) == 0.0 {
                    absent.push((l, k));
                }
            }
        }
        prop_assume!(!absent.is_empty());
        let (l, k) = absent[pick % absent.len()];
        let mut weights = g.weights().clone();
        weights[(l, k)] = 0.7;
        let bigger = ClusteredDigraph::from_weights(weights, g.cluster_sizes()).unwrap();

        let node = start % n;
        let before = g.reachable_set(node).unwrap();
        let after = bigger.reachable_set(node).unwrap();
        prop_assert!(before.is_subset(&after));
    }

    /// Laplacian sign structure and exact zero row sums on generated graphs.
    #[test]
    fn laplacian_structure(seed in 0u64..5000) {
        let g = corpus_graph(seed);
        let lap = g.laplacian();
        prop_assert_eq!(lap.max_row_sum_magnitude(), 0.0);
        let m = lap.matrix();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if r == c {
                    prop_assert!(m[(r, c)] >= 0.0);
                } else {
                    prop_assert!(m[(r, c)] <= 0.0);
                }
            }
        }
    }

    /// A single spanning tree spans every cluster.
    #[test]
    fn spanning_tree_implies_cluster_trees(seed in 0u64..5000) {
        let g = corpus_graph(seed);
        if g.min_spanning_forest_size() == 1 {
            prop_assert!(g.cluster_spanning_trees().satisfied);
        }
    }

    /// The pattern threshold dominates the group threshold on feasible
    /// topologies.
    #[test]
    fn pattern_threshold_dominates(seed in 0u64..5000) {
        let g = corpus_graph(seed);
        if let Ok(t) = control::coupling_thresholds(&g) {
            prop_assert!(t.delta_pattern >= t.delta_group - 1e-12);
        }
    }

    /// Generated graphs satisfy the common influence condition and
    /// regenerate identically from the same seed.
    #[test]
    fn generator_contract(seed in 0u64..5000) {
        let params = generator::corpus_params(seed);
        let a = generator::random_eep_graph(&params, seed).unwrap();
        prop_assert!(quotient::check_common_influence(&a).holds);
        let b = generator::random_eep_graph(&params, seed).unwrap();
        prop_assert_eq!(a.weights(), b.weights());
    }

    /// Scenario files survive a serialize/parse round trip unchanged.
    #[test]
    fn scenario_round_trip(
        agents in 2usize..6,
        delta in prop_oneof![
            (0.01f64..10.0).prop_map(DeltaSpec::Value),
            Just(DeltaSpec::Mode(DeltaMode::AutoGroup)),
            Just(DeltaSpec::Mode(DeltaMode::AutoPattern)),
        ],
        t_final in 1.0f64..50.0,
        dt in 0.001f64..0.1,
        seed in proptest::option::of(0u64..1000),
        weight in 0.1f64..3.0,
    ) {
        let clusters = vec![(1..=agents).collect::<Vec<_>>()];
        let edges: Vec<EdgeSpec> = (1..agents)
            .map(|i| EdgeSpec { from: i, to: i + 1, weight })
            .collect();
        let file = ScenarioFile {
            agents,
            clusters,
            edges,
            dynamics: DynamicsSpec {
                a: vec![vec![0.0, 1.0], vec![-1.0, 0.0]],
                b: vec![vec![0.0], vec![1.0]],
                q: None,
            },
            coupling: CouplingSpec { delta },
            sim: SimSpec {
                t_final,
                dt,
                integrator: "expm".into(),
                seed,
                x0: None,
            },
        };
        let text = file.to_json();
        let parsed = ScenarioFile::from_json(&text).unwrap();
        prop_assert_eq!(&file, &parsed);
        prop_assert_eq!(text, parsed.to_json());
    }
}
