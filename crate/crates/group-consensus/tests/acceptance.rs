//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use group_consensus::control::{self, Dynamics};
use group_consensus::generator;
use group_consensus::graph::{ClusteredDigraph, Edge};
use group_consensus::quotient;
use group_consensus::reduction;
use group_consensus::simulate::{self, Integrator, Scenario};
use group_consensus::spectral;

const CORPUS_SIZE: u64 = 1000;

fn corpus() -> &'static Vec<(u64, ClusteredDigraph)> {
    static CORPUS: OnceLock<Vec<(u64, ClusteredDigraph)>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        (0..CORPUS_SIZE)
            .map(|seed| {
                let params = generator::corpus_params(seed);
                (
                    seed,
                    generator::random_eep_graph(&params, seed).expect("corpus generates"),
                )
            })
            .collect()
    })
}

fn oscillator() -> Dynamics {
    Dynamics::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
    )
    .unwrap()
}

/// 10 agents in 5 clusters of 2, intra-cluster 2-cycles of weight 1 and
/// inter-cluster couplings of weight 0.1 arranged so that clusters 1, 2, 4
/// form one exclusive part, cluster 3 a second, and cluster 5 the common
/// part fed by both reaches.
fn surrogate() -> ClusteredDigraph {
    let mut edges = Vec::new();
    for c in 0..5 {
        let a = 2 * c + 1;
        edges.push(Edge::new(a, a + 1, 1.0));
        edges.push(Edge::new(a + 1, a, 1.0));
    }
    for (from, to) in [(1, 3), (1, 4), (3, 7), (3, 8), (1, 9), (1, 10), (5, 9), (5, 10)] {
        edges.push(Edge::new(from, to, 0.1));
    }
    ClusteredDigraph::new(
        10,
        &[vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8], vec![9, 10]],
        &edges,
    )
    .unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {}: {} ({})",
        criterion,
        if pass { "PASS" } else { "FAIL" },
        detail
    );
    assert!(pass, "criterion {} failed: {}", criterion, detail);
}

#[test]
fn criterion_1_riccati_reproduction() {
    let start = Instant::now();
    let dyn_ = oscillator();
    let (p, _) = control::solve_riccati(&dyn_).unwrap();
    let k = control::gain(&p, dyn_.b()).unwrap();
    let elapsed = start.elapsed();

    let dev1 = (k[(0, 0)] - 0.4142).abs();
    let dev2 = (k[(0, 1)] - 1.3522).abs();
    let pass = dev1 <= 1e-3 && dev2 <= 1e-3 && elapsed.as_secs_f64() < 1.0;
    report(
        "1 (Riccati gain reproduction)",
        pass,
        &format!(
            "K = [{:.6}, {:.6}], deviations ({:.2e}, {:.2e}), {:.3}s",
            k[(0, 0)],
            k[(0, 1)],
            dev1,
            dev2,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_spectrum_split() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for (seed, g) in corpus() {
        match reduction::reduced_laplacian(g) {
            Ok(r) => {
                worst = worst.max(r.spectrum_split.max_pairing_error);
                if !r.spectrum_split.holds {
                    failures += 1;
                    eprintln!("seed {}: pairing error {}", seed, r.spectrum_split.max_pairing_error);
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("seed {}: {}", seed, e);
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures == 0 && elapsed.as_secs_f64() < 120.0;
    report(
        "2 (spectrum split over corpus)",
        pass,
        &format!(
            "{} graphs, worst pairing error {:.3e}, {} failures, {:.1}s",
            corpus().len(),
            worst,
            failures,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_zero_count_cross_check() {
    let mut disagreements = 0usize;
    for (seed, g) in corpus() {
        let spec = spectral::eigenvalues(g.laplacian().matrix()).unwrap();
        if spec.zero_eig_count() != g.min_spanning_forest_size() {
            disagreements += 1;
            eprintln!(
                "seed {}: graph spectral {} vs forest {}",
                seed,
                spec.zero_eig_count(),
                g.min_spanning_forest_size()
            );
        }
        let q = quotient::quotient_graph(g);
        let q_spec = spectral::eigenvalues(q.laplacian()).unwrap();
        if q_spec.zero_eig_count() != q.min_spanning_forest_size() {
            disagreements += 1;
            eprintln!("seed {}: quotient mismatch", seed);
        }
    }
    report(
        "3 (zero-eigenvalue count equals forest size)",
        disagreements == 0,
        &format!("{} graphs, {} disagreements", corpus().len(), disagreements),
    );
}

#[test]
fn criterion_4_criteria_equivalence() {
    let mut disagreements = 0usize;
    let mut mutants = 0usize;
    let mut check = |g: &ClusteredDigraph, seed: u64, label: &str| {
        let equal_forests =
            g.min_spanning_forest_size() == quotient::quotient_graph(g).min_spanning_forest_size();
        let trees = g.cluster_spanning_trees().satisfied;
        if equal_forests != trees {
            disagreements += 1;
            eprintln!(
                "seed {} ({}): equal forests {} vs cluster trees {}",
                seed, label, equal_forests, trees
            );
        }
    };
    for (seed, g) in corpus() {
        check(g, *seed, "corpus");
    }
    // 500 EEP-preserving edge-deleted mutants.
    'outer: for round in 0..10u64 {
        for (seed, g) in corpus() {
            if mutants >= 500 {
                break 'outer;
            }
            let mut rng = generator::rng_for_seed(seed.wrapping_mul(101) + round);
            if let Some(mutant) = generator::delete_random_intra_edge(g, &mut rng) {
                assert!(
                    quotient::check_common_influence(&mutant).holds,
                    "intra deletion must preserve the common influence condition"
                );
                mutants += 1;
                check(&mutant, *seed, "edge-deleted");
            }
        }
    }
    let pass = disagreements == 0 && mutants >= 500;
    report(
        "4 (forest equality <=> cluster spanning trees)",
        pass,
        &format!(
            "{} corpus graphs + {} mutants, {} disagreements",
            corpus().len(),
            mutants,
            disagreements
        ),
    );
}

#[test]
fn criterion_5_surrogate_group_consensus() {
    let start = Instant::now();
    let g = surrogate();
    let dyn_ = oscillator();

    assert!(quotient::check_common_influence(&g).holds);
    assert!(g.cluster_spanning_trees().satisfied);

    let design = control::design(&g, &dyn_).unwrap();
    let mut rng = generator::rng_for_seed(11);
    let x0 = generator::standard_normal_vector(&mut rng, 2 * g.agent_count());
    let scenario = Scenario {
        graph: g,
        dynamics: dyn_,
        delta: design.thresholds.delta_pattern,
        x0,
        t_final: 200.0,
        dt: 0.01,
        integrator: Integrator::MatrixExponential,
    };
    let traj = simulate::simulate(&scenario, &design.k).unwrap();
    let elapsed = start.elapsed();
    let d_final = traj.final_disagreement();
    let pass = !traj.diverged && d_final <= 1e-3 && elapsed.as_secs_f64() < 30.0;
    report(
        "5 (surrogate reaches group consensus at delta_pattern)",
        pass,
        &format!(
            "delta = {:.4}, D(200) = {:.3e}, {:.1}s",
            scenario.delta,
            d_final,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_6_limit_pattern() {
    let g = surrogate();
    let dyn_ = oscillator();
    let design = control::design(&g, &dyn_).unwrap();
    let mut rng = generator::rng_for_seed(23);
    let x0 = generator::standard_normal_vector(&mut rng, 2 * g.agent_count());

    let pred = simulate::predict_limit(&g, &dyn_, &x0).unwrap();

    // Row-stochastic convex weights.
    let w = &pred.convex_weights;
    let mut stochastic = w.nrows() > 0;
    for r in 0..w.nrows() {
        let sum: f64 = (0..w.ncols()).map(|c| w[(r, c)]).sum();
        if (sum - 1.0).abs() > 1e-8 {
            stochastic = false;
        }
        for c in 0..w.ncols() {
            if w[(r, c)] < -1e-10 {
                stochastic = false;
            }
        }
    }

    let scenario = Scenario {
        graph: g.clone(),
        dynamics: dyn_.clone(),
        delta: design.thresholds.delta_pattern,
        x0,
        t_final: 200.0,
        dt: 0.01,
        integrator: Integrator::MatrixExponential,
    };
    let traj = simulate::simulate(&scenario, &design.k).unwrap();
    let verification = simulate::verify_prediction(
        &traj,
        &pred,
        scenario.delta,
        design.thresholds.delta_pattern,
        1e-2,
    )
    .unwrap();
    let tail = verification.tail_max_deviation.unwrap_or(f64::NAN);

    // Clusters 1, 2, 4 share the first exclusive part and must merge.
    let final_state = traj.states.last().unwrap();
    let mut merge_worst = 0.0f64;
    for part in &pred.reach.exclusive {
        let agents: Vec<usize> = part.iter().flat_map(|&ci| g.cluster_range(ci)).collect();
        for (i, &a) in agents.iter().enumerate() {
            for &b in agents.iter().skip(i + 1) {
                let mut dist2 = 0.0;
                for d in 0..2 {
                    let diff = final_state[a * 2 + d] - final_state[b * 2 + d];
                    dist2 += diff * diff;
                }
                merge_worst = merge_worst.max(dist2.sqrt());
            }
        }
    }

    // G_toy2 single-integrator limit weights.
    let toy2 = ClusteredDigraph::new(
        4,
        &[vec![1], vec![2], vec![3, 4]],
        &[
            Edge::new(1, 3, 0.3),
            Edge::new(1, 4, 0.3),
            Edge::new(2, 3, 0.2),
            Edge::new(2, 4, 0.2),
            Edge::new(3, 4, 1.0),
            Edge::new(4, 3, 1.0),
        ],
    )
    .unwrap();
    let integrators = Dynamics::new(
        DMatrix::from_element(1, 1, 0.0),
        DMatrix::from_element(1, 1, 1.0),
    )
    .unwrap();
    let toy_pred =
        simulate::predict_limit(&toy2, &integrators, &DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]))
            .unwrap();
    let wt = &toy_pred.convex_weights;
    let toy_weights_ok = (wt[(0, 0)] - 0.6).abs() <= 1e-9
        && (wt[(0, 1)] - 0.4).abs() <= 1e-9
        && (wt[(1, 0)] - 0.6).abs() <= 1e-9
        && (wt[(1, 1)] - 0.4).abs() <= 1e-9;

    let pass = verification.applicable
        && verification.pass == Some(true)
        && merge_worst <= 1e-3
        && stochastic
        && toy_weights_ok;
    report(
        "6 (limit pattern at delta_pattern)",
        pass,
        &format!(
            "tail deviation {:.3e}, exclusive-part spread {:.3e}, convex weights stochastic: {}, toy2 weights [0.6, 0.4]: {}",
            tail, merge_worst, stochastic, toy_weights_ok
        ),
    );
}

#[test]
fn criterion_7_necessity_on_mutants() {
    let dyn_ = oscillator();
    let (p, _) = control::solve_riccati(&dyn_).unwrap();
    let k = control::gain(&p, dyn_.b()).unwrap();

    let mut produced = 0usize;
    let mut hurwitz_violations = 0usize;
    let mut consensus_dips = 0usize;
    'outer: for round in 0..10u64 {
        for (seed, g) in corpus() {
            if produced >= 100 {
                break 'outer;
            }
            let mut rng = generator::rng_for_seed(seed.wrapping_mul(7) + 1 + round);
            let Some(mutant) = generator::make_infeasible(g, &mut rng) else {
                continue;
            };
            produced += 1;

            let reduction_report = reduction::reduced_laplacian(&mutant).unwrap();
            let (_, margin) = spectral::hurwitz_check(
                dyn_.a(),
                dyn_.b(),
                &k,
                1.0,
                &reduction_report.lhat_spectrum,
            )
            .unwrap();
            // margin = -max Re; necessity: max Re >= -1e-9
            if margin > 1e-9 {
                hurwitz_violations += 1;
                eprintln!("seed {}: transversal spectrum unexpectedly Hurwitz", seed);
            }

            let mut xrng = generator::rng_for_seed(seed ^ 0xfeed);
            let x0 = generator::standard_normal_vector(&mut xrng, 2 * mutant.agent_count());
            let scenario = Scenario {
                graph: mutant,
                dynamics: dyn_.clone(),
                delta: 1.0,
                x0,
                t_final: 200.0,
                dt: 0.05,
                integrator: Integrator::MatrixExponential,
            };
            let traj = simulate::simulate(&scenario, &k).unwrap();
            let min_d = traj
                .disagreement
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_d <= 1e-3 {
                consensus_dips += 1;
                eprintln!("seed {}: disagreement dipped to {}", seed, min_d);
            }
        }
    }
    let pass = produced >= 100 && hurwitz_violations == 0 && consensus_dips == 0;
    report(
        "7 (necessity on infeasible mutants)",
        pass,
        &format!(
            "{} mutants, {} Hurwitz violations, {} disagreement dips",
            produced, hurwitz_violations, consensus_dips
        ),
    );
}

#[test]
fn criterion_8_weak_coupling_regime() {
    let g = surrogate();
    let dyn_ = oscillator();
    let design = control::design(&g, &dyn_).unwrap();
    assert!(
        g.min_spanning_forest_size() >= 2,
        "surrogate must need several spanning trees"
    );
    assert!(design.thresholds.delta_group < design.thresholds.delta_pattern);

    let mut rng = generator::rng_for_seed(31);
    let x0 = generator::standard_normal_vector(&mut rng, 2 * g.agent_count());
    let pred = simulate::predict_limit(&g, &dyn_, &x0).unwrap();
    let scenario = Scenario {
        graph: g,
        dynamics: dyn_,
        delta: design.thresholds.delta_group,
        x0,
        t_final: 200.0,
        dt: 0.01,
        integrator: Integrator::MatrixExponential,
    };
    let traj = simulate::simulate(&scenario, &design.k).unwrap();
    let verification = simulate::verify_prediction(
        &traj,
        &pred,
        scenario.delta,
        design.thresholds.delta_pattern,
        1e-2,
    )
    .unwrap();

    let d_final = traj.final_disagreement();
    let pass = d_final <= 1e-3 && !verification.applicable;
    report(
        "8 (weak coupling: group consensus without the pattern)",
        pass,
        &format!(
            "delta_group = {:.4} < delta_pattern = {:.4}, D(200) = {:.3e}, pattern applicable: {}",
            design.thresholds.delta_group,
            design.thresholds.delta_pattern,
            d_final,
            verification.applicable
        ),
    );
}
