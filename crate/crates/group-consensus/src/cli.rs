//! Command-line front end: scenario ingestion, subcommand dispatch, report
//! and trajectory emission.
//!
//! Exit codes: 0 = success / feasible, 2 = infeasible topology, 1 = input or
//! internal error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::checks::{self, FaultInjection};
use crate::control;
use crate::error::{Error, Result};
use crate::generator::{self, EepGraphParams};
use crate::report::{self, AnalysisReport, SimulationSummary};
use crate::scenario::{CouplingSpec, DeltaMode, DeltaSpec, DynamicsSpec, EdgeSpec, ScenarioFile, SimSpec};
use crate::simulate::{self};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "gcl",
    version,
    about = "Group consensus analysis for clustered linear multi-agent systems"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide group consensusability and synthesize the coupling design
    Analyze {
        /// Scenario JSON file
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the closed loop and verify the predicted pattern
    Simulate {
        /// Scenario JSON file
        file: PathBuf,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Coupling strength: a number, "auto-group" or "auto-pattern"
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// expm (exact propagation) or rk4
        #[arg(long)]
        integrator: Option<String>,
        #[arg(long, default_value = "gcl-out")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Generate a random scenario satisfying the common influence condition
    Gen {
        /// Comma-separated cluster sizes, e.g. 3,3,3
        #[arg(long, default_value = "3,3,3")]
        clusters: String,
        #[arg(long, default_value_t = 0.5)]
        intra_density: f64,
        #[arg(long, default_value_t = 0.5)]
        inter_density: f64,
        #[arg(long, default_value_t = 0.2)]
        w_min: f64,
        #[arg(long, default_value_t = 2.0)]
        w_max: f64,
        #[arg(long)]
        seed: u64,
        /// Output scenario path
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property suites over seeded random graphs
    Verify {
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        /// Self-test hook: corrupt one comparison and expect failures
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Runs the CLI against explicit arguments and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path as well
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Analyze { file, format, out } => cmd_analyze(&file, format, out.as_deref()),
        Command::Simulate {
            file,
            t_final,
            dt,
            delta,
            seed,
            integrator,
            out_dir,
            format,
        } => cmd_simulate(&file, t_final, dt, delta, seed, integrator, &out_dir, format),
        Command::Gen {
            clusters,
            intra_density,
            inter_density,
            w_min,
            w_max,
            seed,
            out,
        } => cmd_gen(&clusters, intra_density, inter_density, (w_min, w_max), seed, &out),
        Command::Verify { seeds, inject_fault } => cmd_verify(
            seeds,
            if inject_fault {
                FaultInjection::SignBug
            } else {
                FaultInjection::None
            },
        ),
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {}", e);
    EXIT_INPUT_ERROR
}

fn build_report(file: &ScenarioFile) -> Result<AnalysisReport> {
    let graph = file.graph()?;
    let dynamics = file.dynamics()?;
    report::analyze(&graph, &dynamics)
}

fn emit(text: String, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn cmd_analyze(path: &Path, format: Format, out: Option<&Path>) -> i32 {
    let file = match ScenarioFile::load(path) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let report = match build_report(&file) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let rendered = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    if let Err(e) = emit(rendered, out) {
        return fail(&e);
    }
    if report.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

enum ResolvedDelta {
    Explicit(f64),
    Auto(DeltaMode),
}

fn parse_delta_flag(text: &str) -> Result<ResolvedDelta> {
    match text {
        "auto-group" => Ok(ResolvedDelta::Auto(DeltaMode::AutoGroup)),
        "auto-pattern" => Ok(ResolvedDelta::Auto(DeltaMode::AutoPattern)),
        number => number
            .parse::<f64>()
            .map(ResolvedDelta::Explicit)
            .map_err(|_| {
                Error::InvalidScenario(format!(
                    "--delta must be a number, 'auto-group' or 'auto-pattern', got '{}'",
                    number
                ))
            }),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &Path,
    t_final: Option<f64>,
    dt: Option<f64>,
    delta_flag: Option<String>,
    seed: Option<u64>,
    integrator: Option<String>,
    out_dir: &Path,
    format: Format,
) -> i32 {
    let mut file = match ScenarioFile::load(path) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    if let Some(t) = t_final {
        file.sim.t_final = t;
    }
    if let Some(d) = dt {
        file.sim.dt = d;
    }
    if let Some(s) = seed {
        file.sim.seed = Some(s);
    }
    if let Some(integ) = integrator {
        file.sim.integrator = integ;
    }

    let requested = match &delta_flag {
        Some(text) => match parse_delta_flag(text) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        },
        None => match file.coupling.delta {
            DeltaSpec::Value(v) => ResolvedDelta::Explicit(v),
            DeltaSpec::Mode(mode) => ResolvedDelta::Auto(mode),
        },
    };

    let graph = match file.graph() {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };
    let dynamics = match file.dynamics() {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };

    let design = match control::design(&graph, &dynamics) {
        Ok(d) => Ok(d),
        Err(e @ Error::Infeasible(_)) => Err(e),
        Err(e @ Error::EepViolation(_)) => Err(e),
        Err(e) => return fail(&e),
    };

    let mut note = None;
    let (delta, delta_source) = match requested {
        ResolvedDelta::Explicit(v) => {
            if !(v > 0.0) {
                return fail(&Error::InvalidScenario(format!(
                    "delta must be positive, got {}",
                    v
                )));
            }
            (v, "explicit".to_string())
        }
        ResolvedDelta::Auto(mode) => {
            let design = match &design {
                Ok(d) => d,
                Err(e) => {
                    // Auto thresholds need a feasible topology.
                    eprintln!("error: {}", e);
                    return EXIT_INFEASIBLE;
                }
            };
            let (threshold, label) = match mode {
                DeltaMode::AutoGroup => (design.thresholds.delta_group, "auto-group"),
                DeltaMode::AutoPattern => (design.thresholds.delta_pattern, "auto-pattern"),
            };
            if threshold > 0.0 {
                (threshold, label.to_string())
            } else {
                note = Some(
                    "threshold is a zero sentinel (any positive delta works); using 1.0".to_string(),
                );
                (1.0, format!("{} (sentinel)", label))
            }
        }
    };

    let k = match &design {
        Ok(d) => d.k.clone(),
        Err(_) => {
            // Infeasible topology with an explicit delta: simulate anyway
            // with the Riccati gain, which exists regardless of the graph.
            match control::solve_riccati(&dynamics)
                .and_then(|(p, _)| control::gain(&p, dynamics.b()))
            {
                Ok(k) => k,
                Err(e) => return fail(&e),
            }
        }
    };

    let (x0, used_seed) = match file.initial_state(&graph, dynamics.state_dim()) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let scenario = simulate::Scenario {
        graph: graph.clone(),
        dynamics: dynamics.clone(),
        delta,
        x0,
        t_final: file.sim.t_final,
        dt: file.sim.dt,
        integrator: match file.integrator() {
            Ok(i) => i,
            Err(e) => return fail(&e),
        },
    };
    if let Err(e) = scenario.validate() {
        return fail(&e);
    }

    let traj = match simulate::simulate(&scenario, &k) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };

    // Pattern verification only when the design exists and trees hold.
    let prediction = match &design {
        Ok(d) => match simulate::predict_limit(&graph, &dynamics, &scenario.x0) {
            Ok(pred) => {
                match simulate::verify_prediction(
                    &traj,
                    &pred,
                    delta,
                    d.thresholds.delta_pattern,
                    simulate::PREDICTION_TOLERANCE,
                ) {
                    Ok(report) => Some(report),
                    Err(e) => return fail(&e),
                }
            }
            Err(_) => None,
        },
        Err(_) => None,
    };

    if let Err(e) = std::fs::create_dir_all(out_dir) {
        return fail(&e.into());
    }
    let csv_path = out_dir.join("trajectory.csv");
    let samples_written = match report::write_trajectory_csv(&csv_path, &graph, &traj) {
        Ok(n) => n,
        Err(e) => return fail(&e),
    };

    let summary = SimulationSummary {
        delta,
        delta_source,
        t_final: scenario.t_final,
        dt: scenario.dt,
        integrator: scenario.integrator.name().to_string(),
        seed: if file.sim.x0.is_some() { None } else { Some(used_seed) },
        samples: traj.times.len(),
        samples_written,
        final_disagreement: traj.final_disagreement(),
        max_disagreement: traj.max_disagreement(),
        diverged: traj.diverged,
        prediction_applicable: prediction.as_ref().is_some_and(|p| p.applicable),
        prediction_deviation: prediction.as_ref().and_then(|p| p.tail_max_deviation),
        prediction_pass: prediction.as_ref().and_then(|p| p.pass),
        prediction_note: note,
    };

    let (rendered, summary_name) = match format {
        Format::Text => (summary.to_text(), "summary.txt"),
        Format::Json => (summary.to_json(), "summary.json"),
    };
    if let Err(e) = std::fs::write(out_dir.join(summary_name), &rendered) {
        return fail(&e.into());
    }
    print!("{}", rendered);
    println!("trajectory: {}", csv_path.display());
    EXIT_OK
}

fn cmd_gen(
    clusters: &str,
    intra_density: f64,
    inter_density: f64,
    weight_range: (f64, f64),
    seed: u64,
    out: &Path,
) -> i32 {
    let sizes: std::result::Result<Vec<usize>, _> = clusters
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect();
    let sizes = match sizes {
        Ok(v) => v,
        Err(_) => {
            return fail(&Error::InvalidScenario(format!(
                "--clusters must be comma-separated sizes, got '{}'",
                clusters
            )))
        }
    };
    let params = EepGraphParams {
        cluster_sizes: sizes.clone(),
        intra_density,
        inter_density,
        weight_range,
    };
    let graph = match generator::random_eep_graph(&params, seed) {
        Ok(g) => g,
        Err(e) => return fail(&e),
    };

    let mut clusters_spec = Vec::with_capacity(graph.cluster_count());
    for ci in 0..graph.cluster_count() {
        clusters_spec.push(graph.cluster_range(ci).map(|i| graph.external_id(i)).collect());
    }
    let mut edges = Vec::new();
    for l in 0..graph.agent_count() {
        for kk in 0..graph.agent_count() {
            let w = graph.weight(l, kk);
            if w > 0.0 {
                edges.push(EdgeSpec {
                    from: graph.external_id(kk),
                    to: graph.external_id(l),
                    weight: w,
                });
            }
        }
    }

    let file = ScenarioFile {
        agents: graph.agent_count(),
        clusters: clusters_spec,
        edges,
        dynamics: DynamicsSpec {
            a: vec![vec![0.0, 1.0], vec![-1.0, 0.0]],
            b: vec![vec![0.0], vec![1.0]],
            q: None,
        },
        coupling: CouplingSpec {
            delta: DeltaSpec::Mode(DeltaMode::AutoPattern),
        },
        sim: SimSpec {
            t_final: 200.0,
            dt: 1e-3,
            integrator: "expm".into(),
            seed: Some(seed),
            x0: None,
        },
    };
    if let Err(e) = file.save(out) {
        return fail(&e);
    }
    println!(
        "wrote {} ({} agents, {} clusters, seed {})",
        out.display(),
        graph.agent_count(),
        graph.cluster_count(),
        seed
    );
    EXIT_OK
}

fn cmd_verify(seeds: u64, fault: FaultInjection) -> i32 {
    if seeds == 0 {
        return fail(&Error::InvalidScenario("--seeds must be positive".into()));
    }
    let outcomes = checks::run_all(seeds, fault);
    let mut all_passed = true;
    println!("{:<38} {:>7} {:>9}  result", "suite", "cases", "failures");
    for outcome in &outcomes {
        let status = if outcome.passed() { "pass" } else { "FAIL" };
        all_passed &= outcome.passed();
        println!(
            "{:<38} {:>7} {:>9}  {}",
            outcome.name,
            outcome.cases,
            outcome.failures.len(),
            status
        );
        for failure in outcome.failures.iter().take(5) {
            println!("    {}", failure);
        }
    }
    println!(
        "overall: {}",
        if all_passed { "all suites passed" } else { "FAILURES present" }
    );
    if all_passed {
        EXIT_OK
    } else {
        EXIT_INPUT_ERROR
    }
}
