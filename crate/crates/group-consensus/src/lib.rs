//! Group consensus of linear multi-agent systems on nonnegative weighted
//! digraphs: decide whether a clustered topology can reach group consensus,
//! synthesize the stabilizing coupling (Riccati gain plus coupling-strength
//! thresholds), simulate the closed loop, and predict the asymptotic
//! multi-cluster pattern.
//!
//! The workflow mirrors the theory it implements:
//!
//! 1. [`graph::ClusteredDigraph`] holds the weighted digraph and its
//!    clustering; [`quotient`] checks the inter-cluster common influence
//!    condition and collapses clusters into the quotient graph.
//! 2. [`reduction`] splits the Laplacian spectrum into the quotient part and
//!    the reduced part that governs motion transversal to the consensus
//!    manifold, and orders the Laplacian by reaches.
//! 3. [`control`] solves the algebraic Riccati equation for the gain
//!    `K = B'P` and turns the spectra into the two coupling thresholds.
//! 4. [`simulate`] integrates the closed loop, measures per-cluster
//!    disagreement, and verifies the predicted limit pattern.
//!
//! Start from the `examples/` directory: each example is a runnable tour of
//! one capability. The `gcl` binary wraps the same pipeline for scenario
//! files.

pub mod algo;
pub mod checks;
pub mod cli;
pub mod control;
pub mod error;
pub mod expm;
pub mod generator;
pub mod graph;
pub mod quotient;
pub mod reduction;
pub mod report;
pub mod scenario;
pub mod simulate;
pub mod spectral;

pub use control::{coupling_thresholds, design, gain, solve_riccati, ControlDesign, Dynamics};
pub use error::{Error, Result};
pub use graph::{ClusteredDigraph, Edge, Laplacian, NodeSet};
pub use quotient::{check_common_influence, quotient_graph, EepReport, QuotientGraph};
pub use reduction::{
    reach_decomposition, reduced_laplacian, similarity_decomposition, ReachDecomposition,
    ReductionReport,
};
pub use simulate::{
    closed_loop_matrix, group_consensus_verdict, predict_limit, simulate, verify_prediction,
    Integrator, LimitPrediction, Scenario, Trajectory, Verdict,
};
pub use spectral::{eigenvalues, hurwitz_check, Spectrum};
