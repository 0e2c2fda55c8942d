//! Seeded random graphs satisfying the common influence condition by
//! construction, plus the mutations the property suites rely on.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::ClusteredDigraph;
use crate::quotient;

const RESAMPLE_BUDGET: usize = 200;

#[derive(Debug, Clone)]
pub struct EepGraphParams {
    pub cluster_sizes: Vec<usize>,
    /// Probability of each ordered intra-cluster edge.
    pub intra_density: f64,
    /// Probability of each ordered cluster pair being coupled.
    pub inter_density: f64,
    /// Uniform range for quotient and intra-cluster weights.
    pub weight_range: (f64, f64),
}

impl EepGraphParams {
    pub fn validate(&self) -> Result<()> {
        if self.cluster_sizes.is_empty() || self.cluster_sizes.contains(&0) {
            return Err(Error::InvalidScenario(
                "cluster sizes must all be at least 1".into(),
            ));
        }
        for (name, d) in [
            ("intra_density", self.intra_density),
            ("inter_density", self.inter_density),
        ] {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidScenario(format!(
                    "{} must lie in (0, 1], got {}",
                    name, d
                )));
            }
        }
        let (lo, hi) = self.weight_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "weight range ({}, {}) must satisfy 0 < lo <= hi",
                lo, hi
            )));
        }
        Ok(())
    }
}

pub fn rng_for_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Splits `total` into `parts` strictly positive weights summing to `total`
/// up to one rounding step (the last part absorbs the accumulation error).
fn split_weight<R: Rng>(rng: &mut R, total: f64, parts: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..parts).map(|_| rng.gen_range(0.1..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut out = Vec::with_capacity(parts);
    let mut used = 0.0;
    for (idx, u) in raw.iter().enumerate() {
        if idx + 1 == parts {
            out.push(total - used);
        } else {
            let w = total * u / sum;
            out.push(w);
            used += w;
        }
    }
    out
}

/// A graph satisfying the common influence condition by construction: sample
/// quotient weights first, then give every node of a receiving cluster
/// incoming edges from randomly chosen source-cluster nodes whose weights sum
/// to the quotient weight. Intra-cluster edges are unconstrained. Resamples
/// until weakly connected.
pub fn random_eep_graph(params: &EepGraphParams, seed: u64) -> Result<ClusteredDigraph> {
    params.validate()?;
    let mut rng = rng_for_seed(seed);
    let sizes = &params.cluster_sizes;
    let n_clusters = sizes.len();
    let total_agents: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, &s| {
            let off = *acc;
            *acc += s;
            Some(off)
        })
        .collect();
    let (lo, hi) = params.weight_range;

    for _ in 0..RESAMPLE_BUDGET {
        let mut weights = DMatrix::<f64>::zeros(total_agents, total_agents);

        for i in 0..n_clusters {
            for j in 0..n_clusters {
                if i == j || rng.gen::<f64>() >= params.inter_density {
                    continue;
                }
                let alpha = rng.gen_range(lo..=hi);
                for l in 0..sizes[i] {
                    let sources = rng.gen_range(1..=sizes[j]);
                    let mut pool: Vec<usize> = (0..sizes[j]).collect();
                    for pick in 0..sources {
                        let swap = rng.gen_range(pick..pool.len());
                        pool.swap(pick, swap);
                    }
                    let parts = split_weight(&mut rng, alpha, sources);
                    for (pick, w) in parts.into_iter().enumerate() {
                        weights[(offsets[i] + l, offsets[j] + pool[pick])] = w;
                    }
                }
            }
        }

        for (ci, &size) in sizes.iter().enumerate() {
            for a in 0..size {
                for b in 0..size {
                    if a != b && rng.gen::<f64>() < params.intra_density {
                        weights[(offsets[ci] + a, offsets[ci] + b)] = rng.gen_range(lo..=hi);
                    }
                }
            }
        }

        match ClusteredDigraph::from_weights(weights, sizes) {
            Ok(g) => return Ok(g),
            Err(Error::NotWeaklyConnected(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::GeneratorBudget(RESAMPLE_BUDGET))
}

/// Deletes one random intra-cluster edge, keeping weak connectivity. Intra
/// edits never disturb the common influence condition: a diagonal-block row
/// sum equals the node's total inter-cluster in-weight.
pub fn delete_random_intra_edge<R: Rng>(
    g: &ClusteredDigraph,
    rng: &mut R,
) -> Option<ClusteredDigraph> {
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for ci in 0..g.cluster_count() {
        for l in g.cluster_range(ci) {
            for k in g.cluster_range(ci) {
                if l != k && g.weight(l, k) > 0.0 {
                    candidates.push((l, k));
                }
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    for pick in 0..candidates.len() {
        let swap = rng.gen_range(pick..candidates.len());
        candidates.swap(pick, swap);
    }
    for (l, k) in candidates {
        let mut weights = g.weights().clone();
        weights[(l, k)] = 0.0;
        if let Ok(mutant) = ClusteredDigraph::from_weights(weights, g.cluster_sizes()) {
            return Some(mutant);
        }
    }
    None
}

/// Produces an infeasible graph that still satisfies the common influence
/// condition: strips every in-edge of one multi-member cluster so that each
/// of its agents becomes a separate source, making the cluster unspannable.
/// Agents left without any edge get a uniform fan-out to one other cluster
/// (which shifts that block's row sums equally, preserving the condition).
/// The result is verified, not trusted.
pub fn make_infeasible<R: Rng>(g: &ClusteredDigraph, rng: &mut R) -> Option<ClusteredDigraph> {
    if g.cluster_count() < 2 {
        return None;
    }
    let mut cluster_order: Vec<usize> = (0..g.cluster_count())
        .filter(|&ci| g.cluster_sizes()[ci] >= 2)
        .collect();
    if cluster_order.is_empty() {
        return None;
    }
    for pick in 0..cluster_order.len() {
        let swap = rng.gen_range(pick..cluster_order.len());
        cluster_order.swap(pick, swap);
    }

    for &ci in &cluster_order {
        let mut weights = g.weights().clone();
        for l in g.cluster_range(ci) {
            for k in 0..g.agent_count() {
                weights[(l, k)] = 0.0;
            }
        }
        // Keep stripped agents attached: fan out to every member of another
        // cluster with one shared weight.
        for u in g.cluster_range(ci) {
            let has_out = (0..g.agent_count()).any(|l| weights[(l, u)] > 0.0);
            if !has_out {
                let mut target = rng.gen_range(0..g.cluster_count() - 1);
                if target >= ci {
                    target += 1;
                }
                for l in g.cluster_range(target) {
                    weights[(l, u)] += 0.5;
                }
            }
        }
        let Ok(mutant) = ClusteredDigraph::from_weights(weights, g.cluster_sizes()) else {
            continue;
        };
        if !quotient::check_common_influence(&mutant).holds {
            continue;
        }
        let q = quotient::quotient_graph(&mutant);
        if mutant.min_spanning_forest_size() != q.min_spanning_forest_size() {
            return Some(mutant);
        }
    }
    None
}

/// Standard normal vector via Box-Muller, deterministic per rng stream.
pub fn standard_normal_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    let mut out = Vec::with_capacity(dim);
    while out.len() < dim {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        out.push(radius * angle.cos());
        if out.len() < dim {
            out.push(radius * angle.sin());
        }
    }
    DVector::from_vec(out)
}

/// The seeded corpus parameterization used by the verification suites: the
/// seed picks cluster counts, sizes and densities, keeping graphs at desk
/// scale (L <= 30).
pub fn corpus_params(seed: u64) -> EepGraphParams {
    let mut rng = rng_for_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n_clusters = rng.gen_range(1..=6usize);
    let mut cluster_sizes = Vec::with_capacity(n_clusters);
    let mut remaining = 30usize;
    for idx in 0..n_clusters {
        let left = n_clusters - idx - 1;
        let max_here = (remaining - left).clamp(1, 6);
        let size = rng.gen_range(1..=max_here);
        cluster_sizes.push(size);
        remaining -= size;
    }
    EepGraphParams {
        cluster_sizes,
        intra_density: rng.gen_range(0.3..=1.0),
        inter_density: rng.gen_range(0.3..=1.0),
        weight_range: (0.2, 2.0),
    }
}
