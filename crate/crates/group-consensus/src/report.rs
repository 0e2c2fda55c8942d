//! Analysis and simulation reports: machine-readable JSON mirrors plus the
//! human-readable text rendering, and the trajectory CSV emitter.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::control::{self, Dynamics};
use crate::error::Result;
use crate::graph::ClusteredDigraph;
use crate::quotient::{self};
use crate::reduction::{self};
use crate::simulate::{self, Trajectory, Verdict};
use crate::spectral::{self, C64};

/// Formats a float with 12 significant digits, trimming trailing zeros.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{}", x);
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.11e}", x);
        match s.split_once('e') {
            Some((mantissa, exponent)) if mantissa.contains('.') => {
                let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{}e{}", trimmed, exponent)
            }
            _ => s,
        }
    }
}

fn complex_pairs(values: &[C64]) -> Vec<[f64; 2]> {
    values.iter().map(|v| [v.re, v.im]).collect()
}

fn complex_list(values: &[C64]) -> String {
    values
        .iter()
        .map(|v| {
            if v.im == 0.0 {
                sig12(v.re)
            } else if v.im > 0.0 {
                format!("{}+{}i", sig12(v.re), sig12(v.im))
            } else {
                format!("{}-{}i", sig12(v.re), sig12(-v.im))
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EepSummary {
    pub holds: bool,
    pub tolerance: f64,
    /// Offending blocks as (cluster_i, cluster_j, spread), 1-based.
    pub violations: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReachSummary {
    /// 1-based cluster indices of the reach.
    pub reach: Vec<usize>,
    /// Its exclusive part.
    pub exclusive: Vec<usize>,
}

/// Everything `analyze` knows about a scenario, with deterministic field
/// order for machine consumption.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub agents: usize,
    pub cluster_sizes: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub eep: EepSummary,
    pub quotient_weights: Vec<Vec<f64>>,
    pub forest_size_graph: usize,
    pub forest_size_quotient: usize,
    pub spectral_zero_graph: Option<usize>,
    pub spectral_zero_quotient: Option<usize>,
    pub spectral_warning: Option<String>,
    pub cluster_spanning_trees: bool,
    /// Per cluster: a witness root agent (1-based), when one exists.
    pub cluster_tree_roots: Vec<Option<usize>>,
    pub feasible: bool,
    pub criteria_agree: bool,
    pub spectrum_full: Vec<[f64; 2]>,
    pub spectrum_quotient: Vec<[f64; 2]>,
    pub spectrum_reduced: Option<Vec<[f64; 2]>>,
    pub spectrum_split_error: Option<f64>,
    pub min_re_reduced: Option<f64>,
    pub lambda_min_nonzero: Option<f64>,
    pub gain: Option<Vec<Vec<f64>>>,
    pub riccati_residual: Option<f64>,
    pub delta_group: Option<f64>,
    pub delta_pattern: Option<f64>,
    pub reaches: Vec<ReachSummary>,
    /// 1-based clusters shared by several reaches.
    pub common_part: Vec<usize>,
    pub convex_weights: Vec<Vec<f64>>,
    pub infeasibility_reason: Option<String>,
}

/// Runs the full analysis pipeline on a graph plus dynamics.
pub fn analyze(g: &ClusteredDigraph, dyn_: &Dynamics) -> Result<AnalysisReport> {
    let verdict: Verdict = simulate::group_consensus_verdict(g);
    let q = quotient::quotient_graph(g);

    let full_spec = spectral::eigenvalues(g.laplacian().matrix())?;
    let quotient_spec = spectral::eigenvalues(q.laplacian())?;

    let reduction_report = if verdict.eep.holds {
        Some(reduction::reduced_laplacian(g)?)
    } else {
        None
    };

    let (gain, riccati_residual) = match control::solve_riccati(dyn_) {
        Ok((p, residual)) => (
            Some(matrix_rows(&control::gain(&p, dyn_.b())?)),
            Some(residual),
        ),
        Err(_) => (None, None),
    };

    let (delta_group, delta_pattern, infeasibility_reason) =
        match control::coupling_thresholds(g) {
            Ok(t) => (Some(t.delta_group), Some(t.delta_pattern), None),
            Err(e) => (None, None, Some(e.to_string())),
        };

    let reach = reduction::reach_decomposition(&q, g);
    let reaches: Vec<ReachSummary> = reach
        .reaches
        .iter()
        .zip(reach.exclusive.iter())
        .map(|(r, v)| ReachSummary {
            reach: r.iter().map(|&c| c + 1).collect(),
            exclusive: v.iter().map(|&c| c + 1).collect(),
        })
        .collect();
    let convex_weights = reach
        .convex_weights()
        .map(|w| matrix_rows(&w))
        .unwrap_or_default();

    let clusters: Vec<Vec<usize>> = (0..g.cluster_count())
        .map(|ci| g.cluster_range(ci).map(|i| g.external_id(i)).collect())
        .collect();

    Ok(AnalysisReport {
        agents: g.agent_count(),
        cluster_sizes: g.cluster_sizes().to_vec(),
        clusters,
        eep: EepSummary {
            holds: verdict.eep.holds,
            tolerance: verdict.eep.tolerance,
            violations: verdict
                .eep
                .violations
                .iter()
                .map(|v| (v.block.0 + 1, v.block.1 + 1, v.spread))
                .collect(),
        },
        quotient_weights: matrix_rows(&nalgebra::DMatrix::from_fn(
            q.node_count(),
            q.node_count(),
            |i, j| q.weight(i, j),
        )),
        forest_size_graph: verdict.forest_size_full,
        forest_size_quotient: verdict.forest_size_quotient,
        spectral_zero_graph: verdict.spectral_zero_full,
        spectral_zero_quotient: verdict.spectral_zero_quotient,
        spectral_warning: verdict.spectral_warning.clone(),
        cluster_spanning_trees: verdict.cluster_trees.satisfied,
        cluster_tree_roots: verdict
            .cluster_trees
            .roots
            .iter()
            .map(|r| r.map(|node| g.external_id(node)))
            .collect(),
        feasible: verdict.feasible,
        criteria_agree: verdict.criteria_agree,
        spectrum_full: complex_pairs(full_spec.values()),
        spectrum_quotient: complex_pairs(quotient_spec.values()),
        spectrum_reduced: reduction_report
            .as_ref()
            .map(|r| complex_pairs(r.lhat_spectrum.values())),
        spectrum_split_error: reduction_report
            .as_ref()
            .map(|r| r.spectrum_split.max_pairing_error),
        min_re_reduced: reduction_report.as_ref().map(|r| {
            r.lhat_spectrum.min_real_part()
        }),
        lambda_min_nonzero: full_spec.min_nonzero_real_part().ok(),
        gain,
        riccati_residual,
        delta_group,
        delta_pattern,
        reaches,
        common_part: reach.common.iter().map(|&c| c + 1).collect(),
        convex_weights,
        infeasibility_reason,
    })
}

fn write_matrix(out: &mut String, label: &str, rows: &[Vec<f64>]) {
    if rows.is_empty() {
        let _ = writeln!(out, "{}: (empty)", label);
        return;
    }
    let _ = writeln!(out, "{}:", label);
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "group consensus analysis");
        let _ = writeln!(out, "========================");
        let _ = writeln!(
            out,
            "agents: {}   clusters: {} (sizes {:?})",
            self.agents,
            self.cluster_sizes.len(),
            self.cluster_sizes
        );
        let _ = writeln!(
            out,
            "inter-cluster common influence (EEP): {} (tolerance {})",
            if self.eep.holds { "holds" } else { "VIOLATED" },
            sig12(self.eep.tolerance)
        );
        for (i, j, spread) in &self.eep.violations {
            let _ = writeln!(
                out,
                "  block ({}, {}) row-sum spread {}",
                i,
                j,
                sig12(*spread)
            );
        }
        let _ = writeln!(
            out,
            "minimum spanning forest: graph m = {}, quotient m = {}",
            self.forest_size_graph, self.forest_size_quotient
        );
        let _ = writeln!(
            out,
            "spectral zero counts (advisory): graph {}, quotient {}",
            self.spectral_zero_graph
                .map_or("n/a".into(), |v| v.to_string()),
            self.spectral_zero_quotient
                .map_or("n/a".into(), |v| v.to_string())
        );
        if let Some(w) = &self.spectral_warning {
            let _ = writeln!(out, "  WARNING: {}", w);
        }
        let roots: Vec<String> = self
            .cluster_tree_roots
            .iter()
            .enumerate()
            .map(|(ci, r)| match r {
                Some(agent) => format!("C{} <- agent {}", ci + 1, agent),
                None => format!("C{} <- none", ci + 1),
            })
            .collect();
        let _ = writeln!(
            out,
            "cluster spanning trees: {} ({})",
            if self.cluster_spanning_trees { "yes" } else { "no" },
            roots.join(", ")
        );
        let _ = writeln!(
            out,
            "feasible (group consensusable): {}",
            if self.feasible { "YES" } else { "NO" }
        );
        if !self.criteria_agree {
            let _ = writeln!(
                out,
                "  INTERNAL ERROR: forest-count and cluster-tree criteria disagree"
            );
        }
        if let Some(reason) = &self.infeasibility_reason {
            let _ = writeln!(out, "  reason: {}", reason);
        }

        let full: Vec<C64> = self
            .spectrum_full
            .iter()
            .map(|p| C64::new(p[0], p[1]))
            .collect();
        let _ = writeln!(out, "sigma(L): {}", complex_list(&full));
        let qvals: Vec<C64> = self
            .spectrum_quotient
            .iter()
            .map(|p| C64::new(p[0], p[1]))
            .collect();
        let _ = writeln!(out, "sigma(L_G): {}", complex_list(&qvals));
        if let Some(reduced) = &self.spectrum_reduced {
            let rvals: Vec<C64> = reduced.iter().map(|p| C64::new(p[0], p[1])).collect();
            let _ = writeln!(out, "sigma(Lhat): {}", complex_list(&rvals));
        }
        if let Some(err) = self.spectrum_split_error {
            let _ = writeln!(out, "spectrum split pairing error: {}", sig12(err));
        }
        if let Some(v) = self.min_re_reduced {
            let _ = writeln!(out, "min Re lambda(Lhat): {}", sig12(v));
        }
        if let Some(v) = self.lambda_min_nonzero {
            let _ = writeln!(out, "lambda_min_nonzero(L): {}", sig12(v));
        }
        if let Some(gain) = &self.gain {
            write_matrix(&mut out, "K = B'P", gain);
        }
        if let Some(residual) = self.riccati_residual {
            let _ = writeln!(out, "Riccati residual: {}", sig12(residual));
        }
        let _ = writeln!(
            out,
            "delta_group: {}   delta_pattern: {}",
            self.delta_group.map_or("undefined".into(), sig12),
            self.delta_pattern.map_or("undefined".into(), sig12)
        );
        for (p, r) in self.reaches.iter().enumerate() {
            let _ = writeln!(
                out,
                "reach {}: clusters {:?}, exclusive part {:?}",
                p + 1,
                r.reach,
                r.exclusive
            );
        }
        let _ = writeln!(out, "common part: {:?}", self.common_part);
        write_matrix(&mut out, "convex weights (-L_F^-1 L_FR)", &self.convex_weights);
        out
    }
}

/// Summary emitted next to the trajectory CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub delta: f64,
    pub delta_source: String,
    pub t_final: f64,
    pub dt: f64,
    pub integrator: String,
    pub seed: Option<u64>,
    pub samples: usize,
    pub samples_written: usize,
    pub final_disagreement: f64,
    pub max_disagreement: f64,
    pub diverged: bool,
    pub prediction_applicable: bool,
    pub prediction_deviation: Option<f64>,
    pub prediction_pass: Option<bool>,
    pub prediction_note: Option<String>,
}

impl SimulationSummary {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serializes");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "simulation summary");
        let _ = writeln!(out, "==================");
        let _ = writeln!(
            out,
            "delta: {} ({})",
            sig12(self.delta),
            self.delta_source
        );
        let _ = writeln!(
            out,
            "t_final: {}   dt: {}   integrator: {}",
            sig12(self.t_final),
            sig12(self.dt),
            self.integrator
        );
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "x0 seed: {}", seed);
        }
        let _ = writeln!(
            out,
            "samples: {} ({} written to CSV)",
            self.samples, self.samples_written
        );
        let _ = writeln!(
            out,
            "final group disagreement D(T): {}",
            sig12(self.final_disagreement)
        );
        let _ = writeln!(
            out,
            "max group disagreement: {}",
            sig12(self.max_disagreement)
        );
        let _ = writeln!(out, "diverged: {}", self.diverged);
        if self.prediction_applicable {
            let _ = writeln!(
                out,
                "pattern prediction: deviation {} -> {}",
                self.prediction_deviation.map_or("n/a".into(), sig12),
                match self.prediction_pass {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "n/a",
                }
            );
        } else {
            let _ = writeln!(out, "pattern prediction: not applicable");
        }
        if let Some(note) = &self.prediction_note {
            let _ = writeln!(out, "note: {}", note);
        }
        out
    }
}

/// Maximum number of CSV rows; longer runs are decimated evenly.
pub const MAX_CSV_ROWS: usize = 5000;

/// Writes the trajectory as `t,x1_1,x1_2,...` with agents in 1-based id
/// order and 12 significant digits. Returns the number of rows written
/// (excluding the header).
pub fn write_trajectory_csv(
    path: &Path,
    g: &ClusteredDigraph,
    traj: &Trajectory,
) -> Result<usize> {
    use std::io::Write as _;
    let n = traj.state_dim();
    let agents = g.agent_count();

    let mut header = String::from("t");
    for agent in 1..=agents {
        for d in 1..=n {
            let _ = write!(header, ",x{}_{}", agent, d);
        }
    }

    let count = traj.times.len();
    let stride = count.div_ceil(MAX_CSV_ROWS).max(1);
    let mut rows: Vec<usize> = (0..count).step_by(stride).collect();
    if *rows.last().unwrap_or(&0) != count - 1 {
        rows.push(count - 1);
    }

    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{}", header)?;
    for &idx in &rows {
        let mut line = sig12(traj.times[idx]);
        let state = &traj.states[idx];
        for agent in 1..=agents {
            let internal = g.internal_index(agent)?;
            for d in 0..n {
                let _ = write!(line, ",{}", sig12(state[internal * n + d]));
            }
        }
        writeln!(out, "{}", line)?;
    }
    Ok(rows.len())
}
