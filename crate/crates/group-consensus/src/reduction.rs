//! The reduced Laplacian governing motion transversal to the group consensus
//! manifold, the similarity decomposition certifying the spectrum split, and
//! the reach-ordered block form of the full Laplacian.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::algo;
use crate::error::{Error, Result};
use crate::graph::ClusteredDigraph;
use crate::quotient::{self, QuotientGraph};
use crate::spectral::{self, C64, Spectrum, PAIRING_TOLERANCE};

/// Certificate that the full Laplacian spectrum is the disjoint union of the
/// quotient spectrum and the reduced spectrum, as complex multisets.
#[derive(Debug, Clone)]
pub struct SpectrumSplit {
    pub full: Vec<C64>,
    pub quotient: Vec<C64>,
    pub reduced: Vec<C64>,
    /// Worst greedy pairing distance between sigma(L) and
    /// sigma(L_G) (+) sigma(Lhat).
    pub max_pairing_error: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// The reduced matrix with its building blocks and the spectrum-split
/// certificate.
#[derive(Debug, Clone)]
pub struct ReductionReport {
    /// (L - N) x (L - N); block (i, j) has shape (l_i - 1) x (l_j - 1).
    pub lhat: DMatrix<f64>,
    /// gamma[i][j]: the first-row slice of block (i, j), length l_j - 1.
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub spectrum_split: SpectrumSplit,
    /// Spectrum of the reduced matrix with the shared zero tolerance.
    pub lhat_spectrum: Spectrum,
}

fn reduced_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = 0usize;
    for &s in sizes {
        offsets.push(acc);
        acc += s - 1;
    }
    offsets
}

/// Assembles the reduced matrix blockwise: block (i, j) is the interior of
/// Laplacian block L_ij minus the rank-one correction by its first row.
/// Requires the common influence condition; the spectrum split is then
/// computed and certified.
pub fn reduced_laplacian(g: &ClusteredDigraph) -> Result<ReductionReport> {
    let eep = quotient::check_common_influence(g);
    if !eep.holds {
        let blocks: Vec<(usize, usize)> = eep.violations.iter().map(|v| v.block).collect();
        return Err(Error::EepViolation(format!(
            "blocks {:?} have nonconstant row sums",
            blocks
        )));
    }

    let lap = g.laplacian();
    let l_mat = lap.matrix();
    let n_clusters = g.cluster_count();
    let sizes = g.cluster_sizes().to_vec();
    let total: usize = sizes.iter().map(|s| s - 1).sum();
    let hat_offsets = reduced_offsets(&sizes);

    let mut lhat = DMatrix::<f64>::zeros(total, total);
    let mut gamma = Vec::with_capacity(n_clusters);
    for i in 0..n_clusters {
        let rho_i = g.cluster_offset(i);
        let mut gamma_row = Vec::with_capacity(n_clusters);
        for j in 0..n_clusters {
            let rho_j = g.cluster_offset(j);
            let cols = sizes[j] - 1;
            let rows = sizes[i] - 1;
            let g_ij: Vec<f64> = (0..cols).map(|c| l_mat[(rho_i, rho_j + 1 + c)]).collect();
            for r in 0..rows {
                for c in 0..cols {
                    let tilde = l_mat[(rho_i + 1 + r, rho_j + 1 + c)];
                    lhat[(hat_offsets[i] + r, hat_offsets[j] + c)] = tilde - g_ij[c];
                }
            }
            gamma_row.push(g_ij);
        }
        gamma.push(gamma_row);
    }

    let full_spec = spectral::eigenvalues(l_mat)?;
    let quotient_spec = spectral::eigenvalues(quotient::quotient_graph(g).laplacian())?;
    let lhat_spectrum = spectral::eigenvalues(&lhat)?;

    let mut combined: Vec<C64> = quotient_spec.values().to_vec();
    combined.extend_from_slice(lhat_spectrum.values());
    let max_pairing_error = spectral::pairing_distance(full_spec.values(), &combined)
        .expect("dimensions always agree: N + (L - N) = L");
    let holds = max_pairing_error <= PAIRING_TOLERANCE;
    let split = SpectrumSplit {
        full: full_spec.values().to_vec(),
        quotient: quotient_spec.values().to_vec(),
        reduced: lhat_spectrum.values().to_vec(),
        max_pairing_error,
        tolerance: PAIRING_TOLERANCE,
        holds,
    };
    if !holds {
        return Err(Error::Numerical(format!(
            "spectrum split pairing error {:.3e} exceeds {:.1e}; the reduced matrix \
             or an eigensolve is inconsistent",
            max_pairing_error, PAIRING_TOLERANCE
        )));
    }

    Ok(ReductionReport {
        lhat,
        gamma,
        spectrum_split: split,
        lhat_spectrum,
    })
}

/// The constructive route of the decomposition: the explicit block transform
/// and permutation that expose `[[L_G, Gamma], [0, Lhat]]`.
#[derive(Debug, Clone)]
pub struct SimilarityDecomposition {
    /// Block-diagonal transform S.
    pub transform: DMatrix<f64>,
    /// Permuted S^-1 L S.
    pub permuted: DMatrix<f64>,
    pub quotient_block: DMatrix<f64>,
    pub gamma_block: DMatrix<f64>,
    pub reduced_block: DMatrix<f64>,
    /// Worst entrywise deviation from the expected block form.
    pub max_mismatch: f64,
}

/// Builds S = blkdiag(S_1 .. S_N) with S_i = [[1, 0], [1, I]], computes
/// S^-1 L S, permutes cluster leaders to the front, and asserts entrywise
/// agreement with `[[L_G, Gamma], [0, Lhat]]` built independently by
/// [`reduced_laplacian`].
pub fn similarity_decomposition(g: &ClusteredDigraph) -> Result<SimilarityDecomposition> {
    let report = reduced_laplacian(g)?;
    let lap = g.laplacian();
    let l_mat = lap.matrix();
    let n_agents = g.agent_count();
    let n_clusters = g.cluster_count();
    let sizes = g.cluster_sizes().to_vec();

    let mut s = DMatrix::<f64>::zeros(n_agents, n_agents);
    let mut s_inv = DMatrix::<f64>::zeros(n_agents, n_agents);
    for i in 0..n_clusters {
        let off = g.cluster_offset(i);
        s[(off, off)] = 1.0;
        s_inv[(off, off)] = 1.0;
        for r in 1..sizes[i] {
            s[(off + r, off)] = 1.0;
            s_inv[(off + r, off)] = -1.0;
            s[(off + r, off + r)] = 1.0;
            s_inv[(off + r, off + r)] = 1.0;
        }
    }

    let transformed = &s_inv * l_mat * &s;

    // Leaders first, in cluster order; then the remaining rows per cluster.
    let mut order: Vec<usize> = (0..n_clusters).map(|i| g.cluster_offset(i)).collect();
    for i in 0..n_clusters {
        order.extend(g.cluster_offset(i) + 1..g.cluster_offset(i) + sizes[i]);
    }
    let mut permuted = DMatrix::<f64>::zeros(n_agents, n_agents);
    for (r, &pr) in order.iter().enumerate() {
        for (c, &pc) in order.iter().enumerate() {
            permuted[(r, c)] = transformed[(pr, pc)];
        }
    }

    let reduced_dim = n_agents - n_clusters;
    let quotient_block = quotient::quotient_graph(g).laplacian().clone();
    let mut gamma_block = DMatrix::<f64>::zeros(n_clusters, reduced_dim);
    let hat_offsets = reduced_offsets(&sizes);
    for i in 0..n_clusters {
        for j in 0..n_clusters {
            for (c, &v) in report.gamma[i][j].iter().enumerate() {
                gamma_block[(i, hat_offsets[j] + c)] = v;
            }
        }
    }

    let mut expected = DMatrix::<f64>::zeros(n_agents, n_agents);
    expected
        .view_mut((0, 0), (n_clusters, n_clusters))
        .copy_from(&quotient_block);
    expected
        .view_mut((0, n_clusters), (n_clusters, reduced_dim))
        .copy_from(&gamma_block);
    expected
        .view_mut((n_clusters, n_clusters), (reduced_dim, reduced_dim))
        .copy_from(&report.lhat);

    let max_mismatch = (&permuted - &expected).abs().max();
    let tolerance = 1e-10 * spectral::inf_norm(l_mat).max(1.0);
    if max_mismatch > tolerance {
        return Err(Error::Numerical(format!(
            "similarity decomposition mismatch {:.3e} exceeds {:.3e}: the constructive \
             transform disagrees with the blockwise reduced matrix",
            max_mismatch, tolerance
        )));
    }

    Ok(SimilarityDecomposition {
        transform: s,
        permuted,
        quotient_block,
        gamma_block,
        reduced_block: report.lhat,
        max_mismatch,
    })
}

/// Reaches of the quotient graph with the block structure they induce on the
/// full Laplacian.
#[derive(Debug, Clone)]
pub struct ReachDecomposition {
    /// Cluster-index sets, one per reach, ordered by smallest source cluster.
    pub reaches: Vec<BTreeSet<usize>>,
    /// Exclusive parts V_p, pairwise disjoint.
    pub exclusive: Vec<BTreeSet<usize>>,
    /// Common part: clusters shared by two or more reaches.
    pub common: BTreeSet<usize>,
    /// Cluster permutation realizing the lower-triangular form:
    /// V_1, ..., V_m, F, each sorted ascending.
    pub cluster_order: Vec<usize>,
    /// The same permutation expanded to agents.
    pub agent_order: Vec<usize>,
    /// Laplacian of the agents in each exclusive part (diagonal blocks).
    pub reach_blocks: Vec<DMatrix<f64>>,
    /// blkdiag of the reach blocks.
    pub l_r: DMatrix<f64>,
    /// Coupling block: rows of common-part agents, columns of reach agents.
    pub l_fr: DMatrix<f64>,
    /// Square block of the common-part agents.
    pub l_f: DMatrix<f64>,
}

impl ReachDecomposition {
    pub fn reach_count(&self) -> usize {
        self.reaches.len()
    }

    /// -L_F^{-1} L_FR: row-stochastic when cluster spanning trees hold;
    /// places common-part limits in the convex hull of the reach limits.
    pub fn convex_weights(&self) -> Result<DMatrix<f64>> {
        let f_dim = self.l_f.nrows();
        if f_dim == 0 {
            return Ok(DMatrix::zeros(0, self.l_r.nrows()));
        }
        let rhs = -&self.l_fr;
        self.l_f
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Infeasible("common-part block L_F is singular".into()))
    }
}

/// Computes the reaches of the quotient (each source component of the
/// condensation reaches one), splits them into exclusive and common parts,
/// and extracts the reach-ordered blocks of the full Laplacian.
pub fn reach_decomposition(q: &QuotientGraph, g: &ClusteredDigraph) -> ReachDecomposition {
    let adj = q.adjacency();
    let cond = q.condensation();

    let mut reaches: Vec<BTreeSet<usize>> = Vec::new();
    for &src in &cond.sources {
        let seen = algo::reachable_from_set(&adj, &cond.components[src]);
        reaches.push(
            seen.iter()
                .enumerate()
                .filter(|(_, &s)| s)
                .map(|(i, _)| i)
                .collect(),
        );
    }

    let m = reaches.len();
    let mut exclusive: Vec<BTreeSet<usize>> = Vec::with_capacity(m);
    for p in 0..m {
        let mut v = reaches[p].clone();
        for (other, reach) in reaches.iter().enumerate() {
            if other != p {
                for c in reach {
                    v.remove(c);
                }
            }
        }
        exclusive.push(v);
    }
    let mut common: BTreeSet<usize> = BTreeSet::new();
    for (p, reach) in reaches.iter().enumerate() {
        for &c in reach {
            if !exclusive[p].contains(&c) {
                common.insert(c);
            }
        }
    }

    let mut cluster_order: Vec<usize> = Vec::with_capacity(q.node_count());
    for v in &exclusive {
        cluster_order.extend(v.iter().copied());
    }
    cluster_order.extend(common.iter().copied());

    let mut agent_order: Vec<usize> = Vec::with_capacity(g.agent_count());
    for &ci in &cluster_order {
        agent_order.extend(g.cluster_range(ci));
    }

    let lap = g.laplacian();
    let l_mat = lap.matrix();
    let permuted = DMatrix::<f64>::from_fn(g.agent_count(), g.agent_count(), |r, c| {
        l_mat[(agent_order[r], agent_order[c])]
    });

    let part_agents = |set: &BTreeSet<usize>| -> usize {
        set.iter().map(|&ci| g.cluster_sizes()[ci]).sum()
    };
    let r_dim: usize = exclusive.iter().map(part_agents).sum();
    let f_dim: usize = part_agents(&common);

    let mut reach_blocks = Vec::with_capacity(m);
    let mut offset = 0usize;
    for v in &exclusive {
        let dim = part_agents(v);
        reach_blocks.push(permuted.view((offset, offset), (dim, dim)).clone_owned());
        offset += dim;
    }

    let mut l_r = DMatrix::<f64>::zeros(r_dim, r_dim);
    let mut off = 0usize;
    for block in &reach_blocks {
        let d = block.nrows();
        l_r.view_mut((off, off), (d, d)).copy_from(block);
        off += d;
    }
    let l_fr = permuted.view((r_dim, 0), (f_dim, r_dim)).clone_owned();
    let l_f = permuted.view((r_dim, r_dim), (f_dim, f_dim)).clone_owned();

    ReachDecomposition {
        reaches,
        exclusive,
        common,
        cluster_order,
        agent_order,
        reach_blocks,
        l_r,
        l_fr,
        l_f,
    }
}

/// Exact (no tolerance) check that permuting the stored Laplacian entries by
/// the reach ordering reproduces `[[L_R, 0], [L_FR, L_F]]`.
pub fn reach_permutation_consistent(g: &ClusteredDigraph, d: &ReachDecomposition) -> bool {
    let lap = g.laplacian();
    let l_mat = lap.matrix();
    let n = g.agent_count();
    let r_dim = d.l_r.nrows();
    for r in 0..n {
        for c in 0..n {
            let v = l_mat[(d.agent_order[r], d.agent_order[c])];
            let expected = if r < r_dim && c < r_dim {
                d.l_r[(r, c)]
            } else if r < r_dim {
                0.0
            } else if c < r_dim {
                d.l_fr[(r - r_dim, c)]
            } else {
                d.l_f[(r - r_dim, c - r_dim)]
            };
            if v != expected {
                return false;
            }
        }
    }
    true
}
