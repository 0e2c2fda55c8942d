//! Executable property suites: the graph-theory lemmas, the spectrum split,
//! the feasibility equivalences and the simulation-level theorems, run over
//! seeded random graphs. The CLI `verify` subcommand batches these; the
//! integration tests reuse them.

use nalgebra::DMatrix;

use crate::control::{self, Dynamics};
use crate::generator::{self};
use crate::graph::ClusteredDigraph;
use crate::quotient::{self};
use crate::reduction::{self};
use crate::simulate::{self, Integrator, Scenario};
use crate::spectral::{self};

/// Self-test hook: `SignBug` deliberately corrupts one comparison so the
/// harness can prove it fails loudly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    None,
    SignBug,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, seed: u64, message: impl Into<String>) {
        // Cap stored failures; the count is what matters for big runs.
        if self.failures.len() < 32 {
            self.failures.push(format!("seed {}: {}", seed, message.into()));
        } else {
            self.failures.push(format!("seed {}", seed));
        }
    }
}

fn oscillator() -> Dynamics {
    Dynamics::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
    )
    .expect("oscillator pair is stabilizable")
}

fn corpus_graph(seed: u64) -> ClusteredDigraph {
    let params = generator::corpus_params(seed);
    generator::random_eep_graph(&params, seed).expect("corpus generation stays within budget")
}

/// Laplacian sign structure and exact zero row sums.
pub fn check_laplacian_invariants(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("laplacian-invariants");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let lap = g.laplacian();
        out.cases += 1;
        if lap.max_row_sum_magnitude() != 0.0 {
            out.fail(seed, "row sums not exactly zero");
            continue;
        }
        let m = lap.matrix();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if r == c && v < 0.0 {
                    out.fail(seed, format!("negative diagonal at {}", r));
                } else if r != c && v > 0.0 {
                    out.fail(seed, format!("positive off-diagonal at ({}, {})", r, c));
                }
            }
        }
    }
    out
}

/// Full m-reducibility statement: the spectral zero count equals the
/// spanning-forest size and every other eigenvalue sits in the open right
/// half-plane, for the graph and its quotient.
pub fn check_zero_eig_counts(seeds: u64, fault: FaultInjection) -> CheckOutcome {
    let mut out = CheckOutcome::new("lemma1-zero-counts");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let q = quotient::quotient_graph(&g);
        out.cases += 1;

        // The injected self-test bug flips the Laplacian sign, which moves
        // every nonzero eigenvalue into the left half-plane.
        let l_matrix = if fault == FaultInjection::SignBug {
            -g.laplacian().matrix().clone()
        } else {
            g.laplacian().matrix().clone()
        };
        let spec = match spectral::eigenvalues(&l_matrix) {
            Ok(s) => s,
            Err(e) => {
                out.fail(seed, e.to_string());
                continue;
            }
        };
        let m_graph = g.min_spanning_forest_size();
        if spec.zero_eig_count() != m_graph {
            out.fail(
                seed,
                format!(
                    "graph: spectral {} vs forest {}",
                    spec.zero_eig_count(),
                    m_graph
                ),
            );
        }
        if spec.zero_eig_count() < spec.values().len() {
            match spec.min_nonzero_real_part() {
                Ok(v) if v <= 0.0 => {
                    out.fail(seed, format!("nonzero eigenvalue with Re = {}", v));
                }
                Err(e) => out.fail(seed, e.to_string()),
                _ => {}
            }
        }

        let q_spec = match spectral::eigenvalues(q.laplacian()) {
            Ok(s) => s,
            Err(e) => {
                out.fail(seed, e.to_string());
                continue;
            }
        };
        if q_spec.zero_eig_count() != q.min_spanning_forest_size() {
            out.fail(
                seed,
                format!(
                    "quotient: spectral {} vs forest {}",
                    q_spec.zero_eig_count(),
                    q.min_spanning_forest_size()
                ),
            );
        }
    }
    out
}

/// The multiset split of the full spectrum into quotient plus reduced parts.
pub fn check_spectrum_split(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("spectrum-split");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        out.cases += 1;
        match reduction::reduced_laplacian(&g) {
            Ok(report) => {
                if !report.spectrum_split.holds {
                    out.fail(
                        seed,
                        format!(
                            "pairing error {}",
                            report.spectrum_split.max_pairing_error
                        ),
                    );
                }
            }
            Err(e) => out.fail(seed, e.to_string()),
        }
    }
    out
}

/// Positive reduced spectrum <=> equal forest counts, over the corpus and
/// both mutation kinds.
pub fn check_feasibility_equivalence(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("lemma2-feasibility-equivalence");
    for seed in 0..seeds {
        let base = corpus_graph(seed);
        let mut rng = generator::rng_for_seed(seed.wrapping_mul(31) + 7);
        let mut variants: Vec<ClusteredDigraph> = vec![base.clone()];
        if let Some(m) = generator::delete_random_intra_edge(&base, &mut rng) {
            variants.push(m);
        }
        if let Some(m) = generator::make_infeasible(&base, &mut rng) {
            variants.push(m);
        }
        for g in variants {
            out.cases += 1;
            let report = match reduction::reduced_laplacian(&g) {
                Ok(r) => r,
                Err(e) => {
                    out.fail(seed, e.to_string());
                    continue;
                }
            };
            let spectrally_stable = report.lhat_spectrum.zero_eig_count() == 0;
            let equal_forests = g.min_spanning_forest_size()
                == quotient::quotient_graph(&g).min_spanning_forest_size();
            if spectrally_stable != equal_forests {
                out.fail(
                    seed,
                    format!(
                        "Re lambda(Lhat) > 0 is {}, equal forests is {}",
                        spectrally_stable, equal_forests
                    ),
                );
            }
        }
    }
    out
}

/// Equal forest counts <=> cluster spanning trees (exact graph computations
/// on both sides).
pub fn check_criteria_equivalence(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("proposition1-criteria-equivalence");
    for seed in 0..seeds {
        let base = corpus_graph(seed);
        let mut rng = generator::rng_for_seed(seed.wrapping_mul(17) + 3);
        let mut variants: Vec<ClusteredDigraph> = vec![base.clone()];
        if let Some(m) = generator::delete_random_intra_edge(&base, &mut rng) {
            variants.push(m);
        }
        if let Some(m) = generator::make_infeasible(&base, &mut rng) {
            variants.push(m);
        }
        for g in variants {
            out.cases += 1;
            let equal_forests = g.min_spanning_forest_size()
                == quotient::quotient_graph(&g).min_spanning_forest_size();
            let trees = g.cluster_spanning_trees().satisfied;
            if equal_forests != trees {
                out.fail(
                    seed,
                    format!("equal forests {} vs cluster trees {}", equal_forests, trees),
                );
            }
        }
    }
    out
}

/// Connectivity inheritance: a spanning tree (strong connectivity) of the
/// graph passes to the quotient.
pub fn check_quotient_connectivity(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("quotient-connectivity-inheritance");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let q = quotient::quotient_graph(&g);
        out.cases += 1;
        if g.min_spanning_forest_size() == 1 && q.min_spanning_forest_size() != 1 {
            out.fail(seed, "graph has a spanning tree but the quotient does not");
        }
        let g_strong = g.condensation().components.len() == 1;
        if g_strong && !q.is_strongly_connected() {
            out.fail(seed, "graph strongly connected but quotient is not");
        }
    }
    out
}

/// Does the intra-cluster subgraph of one cluster admit a spanning tree?
fn intra_subgraph_has_tree(g: &ClusteredDigraph, cluster: usize) -> bool {
    let range = g.cluster_range(cluster);
    let offset = range.start;
    let size = range.len();
    let mut adj = vec![Vec::new(); size];
    for l in range.clone() {
        for k in range.clone() {
            if l != k && g.weight(l, k) > 0.0 {
                adj[k - offset].push(l - offset);
            }
        }
    }
    crate::algo::condensation(&adj).sources.len() == 1
}

/// Root-cluster expansion: a quotient spanning tree whose root cluster is
/// internally spanned forces a full spanning tree.
pub fn check_root_cluster_expansion(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("root-cluster-expansion");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let q = quotient::quotient_graph(&g);
        if q.min_spanning_forest_size() != 1 {
            continue;
        }
        let cond = q.condensation();
        let root_component = &cond.components[cond.sources[0]];
        let rooted = root_component
            .iter()
            .any(|&ci| intra_subgraph_has_tree(&g, ci));
        if !rooted {
            continue;
        }
        out.cases += 1;
        if g.min_spanning_forest_size() != 1 {
            out.fail(seed, "expansion hypothesis met but no spanning tree");
        }
    }
    out
}

/// Cluster spanning trees <=> each exclusive part's cluster union is rooted
/// by one node of the graph.
pub fn check_exclusive_part_spanning(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("exclusive-part-spanning");
    for seed in 0..seeds {
        let base = corpus_graph(seed);
        let mut rng = generator::rng_for_seed(seed.wrapping_mul(13) + 11);
        let mut variants: Vec<ClusteredDigraph> = vec![base.clone()];
        if let Some(m) = generator::make_infeasible(&base, &mut rng) {
            variants.push(m);
        }
        for g in variants {
            out.cases += 1;
            let q = quotient::quotient_graph(&g);
            let d = reduction::reach_decomposition(&q, &g);
            let lhs = g.cluster_spanning_trees().satisfied;
            let rhs = d.exclusive.iter().all(|part| {
                let clusters: Vec<usize> = part.iter().copied().collect();
                g.common_root_of_clusters(&clusters).is_some()
            });
            if lhs != rhs {
                out.fail(
                    seed,
                    format!("cluster trees {} vs exclusive-part roots {}", lhs, rhs),
                );
            }
        }
    }
    out
}

/// Reach-ordered block structure: exact permutation consistency; under
/// cluster spanning trees each diagonal reach block is 1-reducible and the
/// common block has a strictly positive spectrum.
pub fn check_reach_blocks(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("reach-block-structure");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let q = quotient::quotient_graph(&g);
        let d = reduction::reach_decomposition(&q, &g);
        out.cases += 1;
        if !reduction::reach_permutation_consistent(&g, &d) {
            out.fail(seed, "permuted Laplacian does not match the block form");
            continue;
        }
        if !g.cluster_spanning_trees().satisfied {
            continue;
        }
        for (p, block) in d.reach_blocks.iter().enumerate() {
            match spectral::eigenvalues(block) {
                Ok(s) => {
                    if s.zero_eig_count() != 1 {
                        out.fail(
                            seed,
                            format!("reach block {} has {} zero eigenvalues", p, s.zero_eig_count()),
                        );
                    }
                }
                Err(e) => out.fail(seed, e.to_string()),
            }
        }
        if d.l_f.nrows() > 0 {
            match spectral::eigenvalues(&d.l_f) {
                Ok(s) => {
                    if s.zero_eig_count() != 0 || s.min_real_part() <= 0.0 {
                        out.fail(seed, "common block spectrum is not strictly stable");
                    }
                }
                Err(e) => out.fail(seed, e.to_string()),
            }
        }
    }
    out
}

/// The constructive similarity transform agrees with the blockwise reduced
/// matrix entrywise.
pub fn check_similarity_decomposition(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("similarity-decomposition");
    for seed in 0..seeds {
        let g = corpus_graph(seed);
        out.cases += 1;
        if let Err(e) = reduction::similarity_decomposition(&g) {
            out.fail(seed, e.to_string());
        }
    }
    out
}

/// The Lyapunov chain at the group threshold, and the Hurwitz verdicts on
/// both sides of feasibility.
pub fn check_riccati_lyapunov(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("riccati-lyapunov-chain");
    let dyn_ = oscillator();
    let (p, _) = control::solve_riccati(&dyn_).expect("oscillator Riccati solves");
    let k = control::gain(&p, dyn_.b()).expect("gain dims");
    let scale = 1e-8 * (1.0 + spectral::inf_norm(dyn_.q()));

    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let report = match reduction::reduced_laplacian(&g) {
            Ok(r) => r,
            Err(e) => {
                out.cases += 1;
                out.fail(seed, e.to_string());
                continue;
            }
        };
        let thresholds = match control::coupling_thresholds(&g) {
            Ok(t) => t,
            Err(_) => continue, // infeasible graphs checked elsewhere
        };
        out.cases += 1;
        let delta = thresholds.delta_group.max(1e-6);
        match control::lyapunov_chain_excess(&dyn_, &p, &k, delta, &report.lhat_spectrum) {
            Ok(excess) => {
                if excess > scale {
                    out.fail(seed, format!("Lyapunov excess {excess}"));
                }
            }
            Err(e) => out.fail(seed, e.to_string()),
        }
        match spectral::hurwitz_check(dyn_.a(), dyn_.b(), &k, delta, &report.lhat_spectrum) {
            Ok((hurwitz, _)) => {
                if !report.lhat_spectrum.is_empty() && !hurwitz {
                    out.fail(seed, "feasible graph fails the Hurwitz check at delta_group");
                }
            }
            Err(e) => out.fail(seed, e.to_string()),
        }

        // At the pattern threshold every nonzero full-Laplacian eigenvalue
        // must also yield a Hurwitz block.
        let full_spec = match spectral::eigenvalues(g.laplacian().matrix()) {
            Ok(s) => s,
            Err(e) => {
                out.fail(seed, e.to_string());
                continue;
            }
        };
        let nonzero: Vec<_> = full_spec
            .values()
            .iter()
            .copied()
            .filter(|v| v.norm() > full_spec.zero_tolerance())
            .collect();
        if !nonzero.is_empty() && thresholds.delta_pattern > 0.0 {
            let nonzero_spec = spectral::Spectrum::from_values(nonzero, full_spec.zero_tolerance());
            match spectral::hurwitz_check(
                dyn_.a(),
                dyn_.b(),
                &k,
                thresholds.delta_pattern,
                &nonzero_spec,
            ) {
                Ok((hurwitz, _)) => {
                    if !hurwitz {
                        out.fail(
                            seed,
                            "nonzero Laplacian eigenvalue fails the Hurwitz check at delta_pattern",
                        );
                    }
                }
                Err(e) => out.fail(seed, e.to_string()),
            }
        }
    }
    out
}

/// Initializing on the group-consensus manifold keeps the disagreement at
/// rounding level for any coupling strength.
pub fn check_manifold_invariance(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("manifold-invariance");
    let dyn_ = oscillator();
    let (p, _) = control::solve_riccati(&dyn_).expect("oscillator Riccati solves");
    let k = control::gain(&p, dyn_.b()).expect("gain dims");
    let n = dyn_.state_dim();

    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let mut rng = generator::rng_for_seed(seed ^ 0xabcd);
        // One random state per cluster, copied to every member.
        let mut x0 = nalgebra::DVector::<f64>::zeros(n * g.agent_count());
        for ci in 0..g.cluster_count() {
            let v = generator::standard_normal_vector(&mut rng, n);
            for agent in g.cluster_range(ci) {
                for d in 0..n {
                    x0[agent * n + d] = v[d];
                }
            }
        }
        for delta in [0.3, 1.7] {
            out.cases += 1;
            let scenario = Scenario {
                graph: g.clone(),
                dynamics: dyn_.clone(),
                delta,
                x0: x0.clone(),
                t_final: 20.0,
                dt: 0.05,
                integrator: Integrator::MatrixExponential,
            };
            match simulate::simulate(&scenario, &k) {
                Ok(traj) => {
                    if traj.max_disagreement() > 1e-8 {
                        out.fail(
                            seed,
                            format!(
                                "delta {}: disagreement {}",
                                delta,
                                traj.max_disagreement()
                            ),
                        );
                    }
                }
                Err(e) => out.fail(seed, e.to_string()),
            }
        }
    }
    out
}

/// Theorem-level closed-loop behavior: feasible graphs converge below 1e-3
/// at the group threshold; infeasible mutants keep a non-Hurwitz transversal
/// spectrum and visible disagreement.
pub fn check_consensus_convergence(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("theorem1-consensus-convergence");
    let dyn_ = oscillator();
    let (p, _) = control::solve_riccati(&dyn_).expect("oscillator Riccati solves");
    let k = control::gain(&p, dyn_.b()).expect("gain dims");
    let n = dyn_.state_dim();

    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let mut rng = generator::rng_for_seed(seed ^ 0x5eed);
        let x0 = generator::standard_normal_vector(&mut rng, n * g.agent_count());

        if let Ok(thresholds) = control::coupling_thresholds(&g) {
            out.cases += 1;
            let scenario = Scenario {
                graph: g.clone(),
                dynamics: dyn_.clone(),
                delta: thresholds.delta_group.max(1e-3),
                x0: x0.clone(),
                t_final: 200.0,
                dt: 0.05,
                integrator: Integrator::MatrixExponential,
            };
            match simulate::simulate(&scenario, &k) {
                Ok(traj) => {
                    if traj.diverged || traj.final_disagreement() > 1e-3 {
                        out.fail(
                            seed,
                            format!("feasible run ends with D = {}", traj.final_disagreement()),
                        );
                    }
                }
                Err(e) => out.fail(seed, e.to_string()),
            }
        }

        if let Some(mutant) = generator::make_infeasible(&g, &mut rng) {
            out.cases += 1;
            let report = match reduction::reduced_laplacian(&mutant) {
                Ok(r) => r,
                Err(e) => {
                    out.fail(seed, e.to_string());
                    continue;
                }
            };
            match spectral::hurwitz_check(dyn_.a(), dyn_.b(), &k, 1.0, &report.lhat_spectrum) {
                Ok((_, margin)) => {
                    // margin = -max Re; necessity demands max Re >= -1e-9
                    if margin > 1e-9 {
                        out.fail(seed, "infeasible mutant looks Hurwitz");
                        continue;
                    }
                }
                Err(e) => {
                    out.fail(seed, e.to_string());
                    continue;
                }
            }
            let mut mrng = generator::rng_for_seed(seed ^ 0x0bad);
            let mx0 = generator::standard_normal_vector(&mut mrng, n * mutant.agent_count());
            let scenario = Scenario {
                graph: mutant,
                dynamics: dyn_.clone(),
                delta: 1.0,
                x0: mx0,
                t_final: 200.0,
                dt: 0.05,
                integrator: Integrator::MatrixExponential,
            };
            match simulate::simulate(&scenario, &k) {
                Ok(traj) => {
                    let min_d = traj
                        .disagreement
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min);
                    if min_d <= 1e-3 {
                        out.fail(
                            seed,
                            format!("infeasible mutant dipped to D = {}", min_d),
                        );
                    }
                }
                Err(e) => out.fail(seed, e.to_string()),
            }
        }
    }
    out
}

/// Theorem-3 pattern at the strong threshold: tail deviation within 1e-2,
/// exclusive parts merge across clusters, convex weights row stochastic.
pub fn check_limit_pattern(seeds: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("theorem3-limit-pattern");
    let dyn_ = oscillator();
    let (p, _) = control::solve_riccati(&dyn_).expect("oscillator Riccati solves");
    let k = control::gain(&p, dyn_.b()).expect("gain dims");
    let n = dyn_.state_dim();

    for seed in 0..seeds {
        let g = corpus_graph(seed);
        let Ok(thresholds) = control::coupling_thresholds(&g) else {
            continue;
        };
        if !g.cluster_spanning_trees().satisfied {
            continue;
        }
        out.cases += 1;

        let mut rng = generator::rng_for_seed(seed ^ 0x7a77);
        let x0 = generator::standard_normal_vector(&mut rng, n * g.agent_count());
        let pred = match simulate::predict_limit(&g, &dyn_, &x0) {
            Ok(p) => p,
            Err(e) => {
                out.fail(seed, e.to_string());
                continue;
            }
        };

        // Row-stochastic convex weights with nonnegative entries.
        let w = &pred.convex_weights;
        for r in 0..w.nrows() {
            let mut sum = 0.0;
            for c in 0..w.ncols() {
                if w[(r, c)] < -1e-10 {
                    out.fail(seed, format!("convex weight ({}, {}) negative", r, c));
                }
                sum += w[(r, c)];
            }
            if (sum - 1.0).abs() > 1e-8 {
                out.fail(seed, format!("convex weight row {} sums to {}", r, sum));
            }
        }

        let delta = thresholds.delta_pattern.max(1e-3);
        let scenario = Scenario {
            graph: g.clone(),
            dynamics: dyn_.clone(),
            delta,
            x0,
            t_final: 200.0,
            dt: 0.05,
            integrator: Integrator::MatrixExponential,
        };
        let traj = match simulate::simulate(&scenario, &k) {
            Ok(t) => t,
            Err(e) => {
                out.fail(seed, e.to_string());
                continue;
            }
        };
        match simulate::verify_prediction(&traj, &pred, delta, thresholds.delta_pattern, 1e-2) {
            Ok(report) => {
                if !report.applicable {
                    out.fail(seed, "prediction unexpectedly not applicable");
                } else if report.pass != Some(true) {
                    out.fail(
                        seed,
                        format!(
                            "tail deviation {}",
                            report.tail_max_deviation.unwrap_or(f64::NAN)
                        ),
                    );
                }
            }
            Err(e) => out.fail(seed, e.to_string()),
        }

        // Clusters sharing an exclusive part end on a common trajectory.
        let final_state = traj.states.last().expect("nonempty trajectory");
        for part in &pred.reach.exclusive {
            let agents: Vec<usize> = part.iter().flat_map(|&ci| g.cluster_range(ci)).collect();
            for (ai, &a) in agents.iter().enumerate() {
                for &b in agents.iter().skip(ai + 1) {
                    let mut dist2 = 0.0;
                    for d in 0..n {
                        let diff = final_state[a * n + d] - final_state[b * n + d];
                        dist2 += diff * diff;
                    }
                    if dist2.sqrt() > 1e-3 {
                        out.fail(
                            seed,
                            format!("exclusive part split by {}", dist2.sqrt()),
                        );
                    }
                }
            }
        }
    }
    out
}

/// Whole batch in a deterministic order.
pub fn run_all(seeds: u64, fault: FaultInjection) -> Vec<CheckOutcome> {
    vec![
        check_laplacian_invariants(seeds),
        check_zero_eig_counts(seeds, fault),
        check_spectrum_split(seeds),
        check_feasibility_equivalence(seeds),
        check_criteria_equivalence(seeds),
        check_quotient_connectivity(seeds),
        check_root_cluster_expansion(seeds),
        check_exclusive_part_spanning(seeds),
        check_reach_blocks(seeds),
        check_similarity_decomposition(seeds),
        check_riccati_lyapunov(seeds),
        check_manifold_invariance(seeds.min(20)),
        check_consensus_convergence(seeds.min(20)),
        check_limit_pattern(seeds.min(20)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batch_passes() {
        for outcome in run_all(6, FaultInjection::None) {
            assert!(
                outcome.passed(),
                "{} failed: {:?}",
                outcome.name,
                outcome.failures
            );
        }
    }

    #[test]
    fn injected_fault_is_caught() {
        let outcome = check_zero_eig_counts(5, FaultInjection::SignBug);
        assert!(!outcome.passed(), "the sign bug must be detected");
    }
}
