//! The JSON scenario document: graph, dynamics, coupling and simulation
//! settings in one human-editable file.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::control::Dynamics;
use crate::error::{Error, Result};
use crate::generator;
use crate::graph::{ClusteredDigraph, Edge};
use crate::simulate::{Integrator, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSpec {
    /// Row-major state matrix.
    pub a: Vec<Vec<f64>>,
    /// Row-major input matrix.
    pub b: Vec<Vec<f64>>,
    /// Optional Riccati weight; identity when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaMode {
    #[serde(rename = "auto-group")]
    AutoGroup,
    #[serde(rename = "auto-pattern")]
    AutoPattern,
}

/// Either an explicit coupling strength or one of the auto thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Value(f64),
    Mode(DeltaMode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub delta: DeltaSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub t_final: f64,
    pub dt: f64,
    pub integrator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Stacked initial state in agent order; random normal when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub agents: usize,
    pub clusters: Vec<Vec<usize>>,
    pub edges: Vec<EdgeSpec>,
    pub dynamics: DynamicsSpec,
    pub coupling: CouplingSpec,
    pub sim: SimSpec,
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::InvalidScenario(format!("{} matrix is empty", what)));
    }
    let cols = rows[0].len();
    if cols == 0 {
        return Err(Error::InvalidScenario(format!(
            "{} matrix has empty rows",
            what
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidScenario(format!(
                "{} matrix row {} has {} entries, expected {}",
                what,
                i + 1,
                row.len(),
                cols
            )));
        }
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn graph(&self) -> Result<ClusteredDigraph> {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge::new(e.from, e.to, e.weight))
            .collect();
        ClusteredDigraph::new(self.agents, &self.clusters, &edges)
    }

    pub fn dynamics(&self) -> Result<Dynamics> {
        let a = matrix_from_rows(&self.dynamics.a, "A")?;
        let b = matrix_from_rows(&self.dynamics.b, "B")?;
        match &self.dynamics.q {
            Some(q_rows) => {
                let q = matrix_from_rows(q_rows, "Q")?;
                Dynamics::with_weight(a, b, q)
            }
            None => Dynamics::new(a, b),
        }
    }

    pub fn integrator(&self) -> Result<Integrator> {
        Integrator::parse(&self.sim.integrator)
    }

    /// Initial state in internal agent order: taken from the file when
    /// present (stacked in 1-based agent order), otherwise standard normal
    /// entries drawn from the recorded seed.
    pub fn initial_state(&self, g: &ClusteredDigraph, state_dim: usize) -> Result<(DVector<f64>, u64)> {
        let total = state_dim * g.agent_count();
        let seed = self.sim.seed.unwrap_or(0);
        match &self.sim.x0 {
            Some(flat) => {
                if flat.len() != total {
                    return Err(Error::InvalidScenario(format!(
                        "x0 has {} entries, expected n * L = {}",
                        flat.len(),
                        total
                    )));
                }
                let mut x0 = DVector::<f64>::zeros(total);
                for internal in 0..g.agent_count() {
                    let external = g.external_id(internal) - 1;
                    for d in 0..state_dim {
                        x0[internal * state_dim + d] = flat[external * state_dim + d];
                    }
                }
                Ok((x0, seed))
            }
            None => {
                let mut rng = generator::rng_for_seed(seed);
                Ok((generator::standard_normal_vector(&mut rng, total), seed))
            }
        }
    }

    /// Assembles a runnable scenario once the coupling strength is resolved.
    pub fn resolve(&self, delta: f64) -> Result<Scenario> {
        let graph = self.graph()?;
        let dynamics = self.dynamics()?;
        let (x0, _) = self.initial_state(&graph, dynamics.state_dim())?;
        let scenario = Scenario {
            graph,
            dynamics,
            delta,
            x0,
            t_final: self.sim.t_final,
            dt: self.sim.dt,
            integrator: self.integrator()?,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
