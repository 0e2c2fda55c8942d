//! Inter-cluster common influence (EEP) verification and the quotient graph.

use nalgebra::DMatrix;

use crate::algo;
use crate::graph::ClusteredDigraph;

/// One offending Laplacian block in an EEP check.
#[derive(Debug, Clone)]
pub struct EepViolation {
    /// (i, j): rows of cluster i, columns of cluster j.
    pub block: (usize, usize),
    /// Internal row indices whose block row sum strays from the block mean.
    pub rows: Vec<usize>,
    /// Max minus min block row sum.
    pub spread: f64,
}

/// Result of checking that every Laplacian block has constant row sums.
#[derive(Debug, Clone)]
pub struct EepReport {
    pub holds: bool,
    /// N x N matrix of block row-sum means; equals the quotient Laplacian
    /// when the check holds.
    pub beta: DMatrix<f64>,
    pub violations: Vec<EepViolation>,
    /// Tolerance used: 1e-9 * (1 + max |block row sum|).
    pub tolerance: f64,
}

/// Checks the inter-cluster common influence condition: every block L_ij of
/// the partitioned Laplacian must have a constant row sum.
pub fn check_common_influence(g: &ClusteredDigraph) -> EepReport {
    let lap = g.laplacian();
    let n_clusters = g.cluster_count();
    let mut beta = DMatrix::<f64>::zeros(n_clusters, n_clusters);
    let mut max_magnitude = 0.0f64;
    let mut spreads = Vec::new();

    for i in 0..n_clusters {
        for j in 0..n_clusters {
            let block = lap.block(i, j);
            let sums: Vec<f64> = block
                .row_iter()
                .map(|row| row.iter().sum::<f64>())
                .collect();
            let mean = sums.iter().sum::<f64>() / sums.len() as f64;
            let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for &s in &sums {
                max_magnitude = max_magnitude.max(s.abs());
            }
            beta[(i, j)] = mean;
            spreads.push(((i, j), sums, hi - lo));
        }
    }

    let tolerance = 1e-9 * (1.0 + max_magnitude);
    let mut violations = Vec::new();
    for ((i, j), sums, spread) in spreads {
        if spread > tolerance {
            let mean = beta[(i, j)];
            let rows = sums
                .iter()
                .enumerate()
                .filter(|(_, &s)| (s - mean).abs() > tolerance / 2.0)
                .map(|(r, _)| g.cluster_offset(i) + r)
                .collect();
            violations.push(EepViolation {
                block: (i, j),
                rows,
                spread,
            });
        }
    }

    EepReport {
        holds: violations.is_empty(),
        beta,
        violations,
        tolerance,
    }
}

/// The N-node weighted digraph induced by the clustering: edge weight from
/// cluster j to cluster i is the average total in-weight its members receive
/// from cluster j.
#[derive(Debug, Clone)]
pub struct QuotientGraph {
    /// `alpha[(i, j)]` for i != j; the diagonal holds the averaged
    /// intra-cluster weight, which the Laplacian ignores.
    alpha: DMatrix<f64>,
    laplacian: DMatrix<f64>,
}

/// Builds the quotient unconditionally from the averaged weights; consult
/// [`check_common_influence`] before leaning on any theorem about it.
pub fn quotient_graph(g: &ClusteredDigraph) -> QuotientGraph {
    let n_clusters = g.cluster_count();
    let mut alpha = DMatrix::<f64>::zeros(n_clusters, n_clusters);
    for i in 0..n_clusters {
        for j in 0..n_clusters {
            let mut total = 0.0;
            for l in g.cluster_range(i) {
                for k in g.cluster_range(j) {
                    total += g.weight(l, k);
                }
            }
            alpha[(i, j)] = total / g.cluster_sizes()[i] as f64;
        }
    }

    let mut laplacian = DMatrix::<f64>::zeros(n_clusters, n_clusters);
    for i in 0..n_clusters {
        let mut diag = 0.0;
        for j in 0..n_clusters {
            if j != i {
                laplacian[(i, j)] = -alpha[(i, j)];
                diag += alpha[(i, j)];
            }
        }
        laplacian[(i, i)] = diag;
    }

    QuotientGraph { alpha, laplacian }
}

impl QuotientGraph {
    pub fn node_count(&self) -> usize {
        self.alpha.nrows()
    }

    /// Averaged edge weight from cluster `from` to cluster `to`.
    pub fn weight(&self, to: usize, from: usize) -> f64 {
        self.alpha[(to, from)]
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    /// Forward adjacency over clusters; intra-cluster weights carry no edge.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && self.alpha[(i, j)] > 0.0 {
                    adj[j].push(i);
                }
            }
        }
        adj
    }

    pub fn condensation(&self) -> algo::Condensation {
        algo::condensation(&self.adjacency())
    }

    pub fn min_spanning_forest_size(&self) -> usize {
        self.condensation().sources.len()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.condensation().components.len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn g_toy() -> ClusteredDigraph {
        ClusteredDigraph::new(
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
        )
        .unwrap()
    }

    fn g_toy2() -> ClusteredDigraph {
        ClusteredDigraph::new(
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
        .unwrap()
    }

    #[test]
    fn toy_eep_holds_with_block_row_sums() {
        let g = g_toy();
        let report = check_common_influence(&g);
        assert!(report.holds);
        // Block row sums of the G_toy Laplacian: both rows of each block agree.
        let lap = g.laplacian();
        for i in 0..2 {
            for j in 0..2 {
                let block = lap.block(i, j);
                let sums: Vec<f64> = block.row_iter().map(|r| r.iter().sum()).collect();
                assert!((sums[0] - sums[1]).abs() <= report.tolerance);
                assert!((report.beta[(i, j)] - sums[0]).abs() <= report.tolerance);
            }
        }
    }

    #[test]
    fn uneven_inter_cluster_weights_violate_eep() {
        // Node 3 receives 0.5 from cluster 1 but node 4 receives 0.7.
        let g = ClusteredDigraph::new(
            4,
            &[vec![1, 2], vec![3, 4]],
            &[
                Edge::new(2, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(4, 3, 1.0),
                Edge::new(3, 4, 1.0),
                Edge::new(1, 3, 0.5),
                Edge::new(2, 4, 0.7),
            ],
        )
        .unwrap();
        let report = check_common_influence(&g);
        assert!(!report.holds);
        let v = report
            .violations
            .iter()
            .find(|v| v.block == (1, 0))
            .expect("block (2,1) should be flagged");
        assert!((v.spread - 0.2).abs() < 1e-12);
    }

    #[test]
    fn singleton_clusters_trivially_hold() {
        let g = ClusteredDigraph::new(
            3,
            &[vec![1], vec![2], vec![3]],
            &[Edge::new(1, 2, 0.4), Edge::new(2, 3, 1.7)],
        )
        .unwrap();
        assert!(check_common_influence(&g).holds);
    }

    #[test]
    fn toy_quotient_weights_and_laplacian() {
        let q = quotient_graph(&g_toy());
        assert_eq!(q.weight(1, 0), 0.5);
        assert_eq!(q.weight(0, 1), 0.0);
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -0.5, 0.5]);
        assert_eq!(q.laplacian(), &expected);
    }

    #[test]
    fn toy2_quotient() {
        let q = quotient_graph(&g_toy2());
        assert_eq!(q.weight(2, 0), 0.3);
        assert_eq!(q.weight(2, 1), 0.2);
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.3, -0.2, 0.5],
        );
        assert_eq!(q.laplacian(), &expected);
        assert_eq!(q.min_spanning_forest_size(), 2);
    }

    #[test]
    fn single_cluster_quotient_is_zero() {
        let g = ClusteredDigraph::new(
            2,
            &[vec![1, 2]],
            &[Edge::new(1, 2, 1.0), Edge::new(2, 1, 1.0)],
        )
        .unwrap();
        let q = quotient_graph(&g);
        assert_eq!(q.laplacian(), &DMatrix::zeros(1, 1));
    }

    #[test]
    fn quotient_matches_beta_under_eep() {
        let g = g_toy();
        let report = check_common_influence(&g);
        let q = quotient_graph(&g);
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (q.laplacian()[(i, j)] - report.beta[(i, j)]).abs() <= 1e-12,
                    "quotient Laplacian must equal block row sums under EEP"
                );
            }
        }
    }
}
