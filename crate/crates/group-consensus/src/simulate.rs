//! Closed-loop integration, group-disagreement measurement, the asymptotic
//! pattern predictor, and the combined feasibility verdict.

use nalgebra::{DMatrix, DVector};

use crate::control::Dynamics;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::graph::{ClusteredDigraph, ClusterSpanningTrees};
use crate::quotient::{self, EepReport};
use crate::reduction::{self, ReachDecomposition};
use crate::spectral;

/// State-norm bound beyond which a run is declared divergent. Divergence is
/// a first-class outcome: infeasible topologies with unstable dynamics
/// genuinely blow up.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// Exact propagation by the matrix exponential of the closed-loop matrix.
    MatrixExponential,
    /// Fixed-step fourth-order Runge-Kutta.
    RungeKutta4,
}

impl Integrator {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "expm" => Ok(Integrator::MatrixExponential),
            "rk4" => Ok(Integrator::RungeKutta4),
            other => Err(Error::InvalidScenario(format!(
                "unknown integrator '{}' (expected 'expm' or 'rk4')",
                other
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Integrator::MatrixExponential => "expm",
            Integrator::RungeKutta4 => "rk4",
        }
    }
}

/// A fully resolved simulation setup. The initial state is stacked in the
/// graph's internal agent order.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub graph: ClusteredDigraph,
    pub dynamics: Dynamics,
    pub delta: f64,
    pub x0: DVector<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub integrator: Integrator,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.t_final < self.dt {
            return Err(Error::InvalidScenario(format!(
                "t_final = {} is shorter than one step dt = {}",
                self.t_final, self.dt
            )));
        }
        let expected = self.dynamics.state_dim() * self.graph.agent_count();
        if self.x0.len() != expected {
            return Err(Error::InvalidScenario(format!(
                "x0 has {} entries, expected n * L = {}",
                self.x0.len(),
                expected
            )));
        }
        Ok(())
    }
}

/// `I_L (x) A - delta * L (x) B K`, assembled explicitly.
pub fn closed_loop_matrix(scenario: &Scenario, k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = scenario.dynamics.state_dim();
    if k.nrows() != scenario.dynamics.input_dim() || k.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{}, expected {}x{}",
            k.nrows(),
            k.ncols(),
            scenario.dynamics.input_dim(),
            n
        )));
    }
    let l_count = scenario.graph.agent_count();
    let lap = scenario.graph.laplacian();
    let eye = DMatrix::<f64>::identity(l_count, l_count);
    let bk = scenario.dynamics.b() * k;
    Ok(eye.kronecker(scenario.dynamics.a()) - (lap.matrix() * scenario.delta).kronecker(&bk))
}

/// A sampled closed-loop run with its disagreement series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Stacked states in internal agent order, one per sample.
    pub states: Vec<DVector<f64>>,
    /// Per-sample, per-cluster max pairwise state distance.
    pub cluster_disagreement: Vec<Vec<f64>>,
    /// Per-sample max over clusters.
    pub disagreement: Vec<f64>,
    pub diverged: bool,
    state_dim: usize,
    cluster_sizes: Vec<usize>,
    cluster_offsets: Vec<usize>,
}

impl Trajectory {
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn final_disagreement(&self) -> f64 {
        *self.disagreement.last().unwrap_or(&f64::NAN)
    }

    pub fn max_disagreement(&self) -> f64 {
        self.disagreement.iter().cloned().fold(0.0, f64::max)
    }

    /// Stacked intra-cluster differences x_l - x_(cluster leader), the error
    /// coordinates of the transversal dynamics. Length (L - N) * n.
    pub fn error_vector(&self, sample: usize) -> DVector<f64> {
        let n = self.state_dim;
        let x = &self.states[sample];
        let reduced: usize = self.cluster_sizes.iter().map(|s| s - 1).sum();
        let mut e = DVector::<f64>::zeros(reduced * n);
        let mut row = 0usize;
        for (ci, &size) in self.cluster_sizes.iter().enumerate() {
            let leader = self.cluster_offsets[ci];
            for member in 1..size {
                let agent = leader + member;
                for d in 0..n {
                    e[row * n + d] = x[agent * n + d] - x[leader * n + d];
                }
                row += 1;
            }
        }
        e
    }
}

fn disagreement_of(
    x: &DVector<f64>,
    n: usize,
    sizes: &[usize],
    offsets: &[usize],
) -> (Vec<f64>, f64) {
    let mut per_cluster = Vec::with_capacity(sizes.len());
    let mut overall = 0.0f64;
    for (ci, &size) in sizes.iter().enumerate() {
        let off = offsets[ci];
        let mut worst = 0.0f64;
        for a in 0..size {
            for b in a + 1..size {
                let mut dist2 = 0.0;
                for d in 0..n {
                    let diff = x[(off + a) * n + d] - x[(off + b) * n + d];
                    dist2 += diff * diff;
                }
                worst = worst.max(dist2.sqrt());
            }
        }
        per_cluster.push(worst);
        overall = overall.max(worst);
    }
    (per_cluster, overall)
}

/// Integrates the closed loop and records the disagreement series. The run
/// stops early (with `diverged = true`) once the state norm passes the
/// divergence threshold.
pub fn simulate(scenario: &Scenario, k: &DMatrix<f64>) -> Result<Trajectory> {
    scenario.validate()?;
    let m = closed_loop_matrix(scenario, k)?;
    let n = scenario.dynamics.state_dim();
    let sizes = scenario.graph.cluster_sizes().to_vec();
    let offsets: Vec<usize> = (0..sizes.len())
        .map(|i| scenario.graph.cluster_offset(i))
        .collect();

    let steps = (scenario.t_final / scenario.dt + 1e-9).floor() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut cluster_disagreement = Vec::with_capacity(steps + 1);
    let mut disagreement = Vec::with_capacity(steps + 1);
    let mut diverged = false;

    let propagator = match scenario.integrator {
        Integrator::MatrixExponential => Some(expm(&(&m * scenario.dt))?),
        Integrator::RungeKutta4 => None,
    };

    let mut x = scenario.x0.clone();
    for step in 0..=steps {
        let t = step as f64 * scenario.dt;
        let (per_cluster, overall) = disagreement_of(&x, n, &sizes, &offsets);
        times.push(t);
        states.push(x.clone());
        cluster_disagreement.push(per_cluster);
        disagreement.push(overall);

        if x.norm() > DIVERGENCE_THRESHOLD {
            diverged = true;
            break;
        }
        if step == steps {
            break;
        }
        x = match &propagator {
            Some(e) => e * &x,
            None => {
                let dt = scenario.dt;
                let k1 = &m * &x;
                let k2 = &m * &(&x + &k1 * (dt / 2.0));
                let k3 = &m * &(&x + &k2 * (dt / 2.0));
                let k4 = &m * &(&x + &k3 * dt);
                &x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
            }
        };
    }

    Ok(Trajectory {
        times,
        states,
        cluster_disagreement,
        disagreement,
        diverged,
        state_dim: n,
        cluster_sizes: sizes,
        cluster_offsets: offsets,
    })
}

/// Which of the two asymptotic forms applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionForm {
    /// One reach: every agent approaches the same trajectory.
    GlobalConsensus,
    /// Several reaches: exclusive parts consense per reach, the common part
    /// lands in their convex hull.
    ReachPattern,
}

/// The asymptotic state predictor: exclusive parts follow their reach's
/// weighted average propagated by e^(At); common-part agents follow the
/// row-stochastic mix of the reach limits.
#[derive(Debug, Clone)]
pub struct LimitPrediction {
    pub form: PredictionForm,
    /// blkdiag(mu_p nu_p') over the reach agents.
    pub xi: DMatrix<f64>,
    /// Left zero eigenvectors of the reach blocks, normalized against the
    /// all-ones right eigenvector.
    pub left_vectors: Vec<DVector<f64>>,
    /// -L_F^-1 L_FR, row stochastic.
    pub convex_weights: DMatrix<f64>,
    pub reach: ReachDecomposition,
    a: DMatrix<f64>,
    /// Combined limit operator [Xi; W Xi] in reach agent order.
    limit_operator: DMatrix<f64>,
    /// Initial reach states as an r x n matrix (one row per reach agent).
    x0_reach_rows: DMatrix<f64>,
    state_dim: usize,
    agent_count: usize,
}

/// Left eigenvector of a Laplacian block for its simple zero eigenvalue,
/// normalized so its entries sum to one.
fn left_null_vector(block: &DMatrix<f64>) -> Result<DVector<f64>> {
    let dim = block.nrows();
    if dim == 0 {
        return Err(Error::Numerical("empty Laplacian block".into()));
    }
    if dim == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    let svd = block.transpose().svd(false, true);
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Numerical("SVD did not return V^T".into()))?;
    let smallest = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .map(|(i, _)| i)
        .expect("nonempty singular values");
    // the right singular vector for the smallest singular value spans the
    // null space of block'
    let mut v: DVector<f64> = v_t.row(smallest).transpose();
    let sum: f64 = v.iter().sum();
    if sum.abs() < 1e-12 {
        return Err(Error::Numerical(
            "left null vector is orthogonal to the ones vector; block is not \
             a 1-reducible Laplacian"
                .into(),
        ));
    }
    v /= sum;
    Ok(v)
}

/// Builds the Theorem-3 predictor. Requires cluster spanning trees (the
/// pattern is only claimed for feasible topologies).
pub fn predict_limit(
    g: &ClusteredDigraph,
    dyn_: &Dynamics,
    x0: &DVector<f64>,
) -> Result<LimitPrediction> {
    let n = dyn_.state_dim();
    if x0.len() != n * g.agent_count() {
        return Err(Error::DimensionMismatch(format!(
            "x0 has {} entries, expected {}",
            x0.len(),
            n * g.agent_count()
        )));
    }
    let trees = g.cluster_spanning_trees();
    if !trees.satisfied {
        return Err(Error::Infeasible(
            "cluster spanning trees are missing; Theorem-style limit patterns \
             are not claimed"
                .into(),
        ));
    }

    let q = quotient::quotient_graph(g);
    let reach = reduction::reach_decomposition(&q, g);
    let r_dim = reach.l_r.nrows();
    let f_dim = reach.l_f.nrows();

    let mut xi = DMatrix::<f64>::zeros(r_dim, r_dim);
    let mut left_vectors = Vec::with_capacity(reach.reach_blocks.len());
    let mut off = 0usize;
    for block in &reach.reach_blocks {
        let d = block.nrows();
        let nu = left_null_vector(block)?;
        for r in 0..d {
            for c in 0..d {
                xi[(off + r, off + c)] = nu[c];
            }
        }
        left_vectors.push(nu);
        off += d;
    }

    let convex_weights = reach.convex_weights()?;

    let mut limit_operator = DMatrix::<f64>::zeros(r_dim + f_dim, r_dim);
    limit_operator.view_mut((0, 0), (r_dim, r_dim)).copy_from(&xi);
    if f_dim > 0 {
        let wf = &convex_weights * &xi;
        limit_operator
            .view_mut((r_dim, 0), (f_dim, r_dim))
            .copy_from(&wf);
    }

    let mut x0_reach_rows = DMatrix::<f64>::zeros(r_dim, n);
    for (row, &agent) in reach.agent_order.iter().take(r_dim).enumerate() {
        for d in 0..n {
            x0_reach_rows[(row, d)] = x0[agent * n + d];
        }
    }

    let form = if reach.reach_count() == 1 {
        PredictionForm::GlobalConsensus
    } else {
        PredictionForm::ReachPattern
    };

    Ok(LimitPrediction {
        form,
        xi,
        left_vectors,
        convex_weights,
        reach,
        a: dyn_.a().clone(),
        limit_operator,
        x0_reach_rows,
        state_dim: n,
        agent_count: g.agent_count(),
    })
}

impl LimitPrediction {
    /// Predicted stacked state at time t, in internal agent order.
    pub fn state_at(&self, t: f64) -> Result<DVector<f64>> {
        let n = self.state_dim;
        let e_at = expm(&(&self.a * t))?;
        // Z holds the limit mix per reach-ordered agent; propagate each row.
        let z = &self.limit_operator * &self.x0_reach_rows;
        let mut out = DVector::<f64>::zeros(self.agent_count * n);
        for (row, &agent) in self.reach.agent_order.iter().enumerate() {
            let mixed = DVector::from_iterator(n, (0..n).map(|d| z[(row, d)]));
            let propagated = &e_at * mixed;
            for d in 0..n {
                out[agent * n + d] = propagated[d];
            }
        }
        Ok(out)
    }
}

/// Outcome of comparing a trajectory tail with the predicted pattern.
#[derive(Debug, Clone)]
pub struct PredictionReport {
    /// False when delta < delta_pattern: the pattern is not claimed there.
    pub applicable: bool,
    /// Max over the tail window of |x - xhat| / (1 + |xhat|).
    pub tail_max_deviation: Option<f64>,
    pub pass: Option<bool>,
    pub tolerance: f64,
}

/// Default tolerance for the relative tail deviation.
pub const PREDICTION_TOLERANCE: f64 = 1e-2;

/// Fraction of trailing samples examined.
const TAIL_FRACTION: f64 = 0.1;

/// Compares the simulated tail against the predictor. Only applicable when
/// the run used a coupling strength at or above the pattern threshold.
pub fn verify_prediction(
    traj: &Trajectory,
    pred: &LimitPrediction,
    delta: f64,
    delta_pattern: f64,
    tolerance: f64,
) -> Result<PredictionReport> {
    // The boundary value is admissible; guard against rounding on it.
    let applicable = delta >= delta_pattern * (1.0 - 1e-12);
    if !applicable {
        return Ok(PredictionReport {
            applicable: false,
            tail_max_deviation: None,
            pass: None,
            tolerance,
        });
    }
    let count = traj.times.len();
    if count == 0 {
        return Err(Error::InvalidScenario("empty trajectory".into()));
    }
    let tail_start = count - ((count as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, count);
    let mut worst = 0.0f64;
    for idx in tail_start..count {
        let predicted = pred.state_at(traj.times[idx])?;
        let deviation = (&traj.states[idx] - &predicted).norm() / (1.0 + predicted.norm());
        worst = worst.max(deviation);
    }
    Ok(PredictionReport {
        applicable: true,
        tail_max_deviation: Some(worst),
        pass: Some(worst <= tolerance),
        tolerance,
    })
}

/// The combined feasibility verdict of Theorem 1 / Theorem 2 / Proposition 1.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub eep: EepReport,
    /// Exact graph-theoretic counts (the source of truth).
    pub forest_size_full: usize,
    pub forest_size_quotient: usize,
    /// Spectral zero-eigenvalue counts (advisory cross-check).
    pub spectral_zero_full: Option<usize>,
    pub spectral_zero_quotient: Option<usize>,
    pub cluster_trees: ClusterSpanningTrees,
    /// EEP holds and the graph and quotient need equally many spanning trees.
    pub feasible: bool,
    /// Proposition 1: the two criteria must agree; false flags an internal
    /// inconsistency, not a property of the input.
    pub criteria_agree: bool,
    /// Set when a spectral count disagrees with the exact graph count.
    pub spectral_warning: Option<String>,
}

/// Runs every feasibility criterion and cross-checks them against each other.
pub fn group_consensus_verdict(g: &ClusteredDigraph) -> Verdict {
    let eep = quotient::check_common_influence(g);
    let q = quotient::quotient_graph(g);
    let forest_size_full = g.min_spanning_forest_size();
    let forest_size_quotient = q.min_spanning_forest_size();
    let cluster_trees = g.cluster_spanning_trees();

    let spectral_zero_full = spectral::eigenvalues(g.laplacian().matrix())
        .ok()
        .map(|s| s.zero_eig_count());
    let spectral_zero_quotient = spectral::eigenvalues(q.laplacian())
        .ok()
        .map(|s| s.zero_eig_count());

    let mut spectral_warning = None;
    if let Some(z) = spectral_zero_full {
        if z != forest_size_full {
            spectral_warning = Some(format!(
                "spectral zero count {} of L disagrees with graph count {}",
                z, forest_size_full
            ));
        }
    }
    if let Some(z) = spectral_zero_quotient {
        if z != forest_size_quotient && spectral_warning.is_none() {
            spectral_warning = Some(format!(
                "spectral zero count {} of L_G disagrees with graph count {}",
                z, forest_size_quotient
            ));
        }
    }

    let equal_forests = forest_size_full == forest_size_quotient;
    let feasible = eep.holds && equal_forests;
    // Proposition 1 holds under EEP only.
    let criteria_agree = !eep.holds || (equal_forests == cluster_trees.satisfied);

    Verdict {
        eep,
        forest_size_full,
        forest_size_quotient,
        spectral_zero_full,
        spectral_zero_quotient,
        cluster_trees,
        feasible,
        criteria_agree,
        spectral_warning,
    }
}
