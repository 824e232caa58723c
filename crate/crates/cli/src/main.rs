//! `meco`: command-line front end for the offloading solvers. Three batch
//! subcommands — `validate` checks scenario feasibility and reports the order
//! class, `solve` writes a solution JSON for one instance, `sweep` runs a
//! seeded Monte Carlo experiment and emits the CSV.
//!
//! Exit codes: 0 success, 1 domain failure (infeasible instance, solver
//! error), 2 usage or parse failure. Failures print a machine-readable
//! `{"error": {"kind", "message"}}` object to stderr. All outputs are
//! reproducible from the input file and flags; solution files contain no
//! wall-clock or environment-dependent data.

mod solution;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use meco_core::bcd::{solve_bcd, BcdOptions};
use meco_core::energy::EnergyModel;
use meco_core::harness::{run_sweep, write_csv, ExperimentRow, SweepSpec};
use meco_core::oracle::{oracle_solve, OracleOptions};
use meco_core::ordered::solve_identical;
use meco_core::reverse::solve_reverse;
use meco_core::scenario::ScenarioFile;
use meco_core::timeline::{
    build_timeline, classify_order, offload_bounds, validate_tasks, OrderClass, TaskSpec,
};
use meco_core::Error;

use solution::{SolutionFile, SCHEMA_VERSION};

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "meco", version, about = "Energy-minimal multiuser computation offloading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file: per-mobile feasibility and order class.
    Validate {
        /// Scenario JSON path.
        file: PathBuf,
    },
    /// Solve one scenario and write a solution JSON.
    Solve {
        /// Scenario JSON path.
        file: PathBuf,
        /// Solver selection; `auto` dispatches on the order class.
        #[arg(long, value_enum, default_value_t = Solver::Auto)]
        solver: Solver,
        /// Convergence-tolerance override (iterative solvers only).
        #[arg(long)]
        tol: Option<f64>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a Monte Carlo sweep and emit the aggregate CSV.
    Sweep {
        /// Sweep-spec JSON path.
        spec: PathBuf,
        /// CSV output path; stdout when omitted (summary then on stderr).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Master-seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for realizations; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Auto,
    Bcd,
    Ordered,
    Reverse,
    Oracle,
}

impl Solver {
    fn name(self) -> &'static str {
        match self {
            Solver::Auto => "auto",
            Solver::Bcd => "bcd",
            Solver::Ordered => "ordered",
            Solver::Reverse => "reverse",
            Solver::Oracle => "oracle",
        }
    }
}

/// A command failure: exit code plus the machine-readable error object.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "parse",
            message: message.into(),
        }
    }

    fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            kind,
            message: message.into(),
        }
    }

    /// Map a solver error. Routing errors (wrong order class, bounded caps,
    /// unsupported monomial order under an explicit `--solver`) surface as a
    /// solver/instance mismatch.
    fn from_solver(err: Error) -> Self {
        match &err {
            Error::OrderMismatch { .. }
            | Error::BoundedCaps { .. }
            | Error::UnsupportedMonomialOrder(_) => Failure::domain(
                "solver_mismatch",
                format!("solver/instance mismatch: {err}"),
            ),
            Error::InvalidTask { .. } | Error::InvalidParams(_) | Error::EmptyTaskList => {
                Failure::domain("invalid_instance", err.to_string())
            }
            Error::InfeasibleInstance { .. } => Failure::domain("infeasible", err.to_string()),
            _ => Failure::domain("solver_failure", err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Solve {
            file,
            solver,
            tol,
            output,
        } => cmd_solve(&file, solver, tol, output.as_deref()),
        Command::Sweep {
            spec,
            output,
            seed,
            jobs,
        } => cmd_sweep(&spec, output.as_deref(), seed, jobs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let obj = serde_json::json!({
                "error": { "kind": failure.kind, "message": failure.message }
            });
            eprintln!("{obj}");
            ExitCode::from(failure.code)
        }
    }
}

fn read_scenario(path: &Path) -> Result<ScenarioFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    ScenarioFile::from_json(&text).map_err(|e| Failure::usage(e.to_string()))
}

fn order_name(class: OrderClass) -> &'static str {
    match class {
        OrderClass::General => "General",
        OrderClass::Identical => "Identical",
        OrderClass::Reverse => "Reverse",
    }
}

fn cmd_validate(file: &Path) -> Result<(), Failure> {
    let scenario = read_scenario(file)?;
    let report = validate_tasks(&scenario.tasks, &scenario.params)
        .map_err(|e| Failure::domain("invalid_instance", e.to_string()))?;

    println!("order class: {}", order_name(classify_order(&scenario.tasks)));
    println!("{:<8} {:>16} {:>16} {:>9}", "mobile", "r_min_bits", "r_max_bits", "feasible");
    for m in &report.mobiles {
        println!(
            "{:<8} {:>16.6e} {:>16.6e} {:>9}",
            m.id,
            m.r_min_bits,
            m.r_max_bits,
            if m.feasible { "yes" } else { "NO" }
        );
    }
    if !report.overlap_assumption_holds {
        println!("note: consecutive windows do not all overlap; the instance decouples");
    }
    let infeasible: Vec<usize> = report
        .mobiles
        .iter()
        .filter(|m| !m.feasible)
        .map(|m| m.id)
        .collect();
    if infeasible.is_empty() {
        println!("all {} mobiles feasible", report.mobiles.len());
        Ok(())
    } else {
        Err(Failure::domain(
            "infeasible",
            format!("infeasible mobiles: {infeasible:?}"),
        ))
    }
}

/// `auto` routing: the structured solvers when the instance is in their
/// domain (m = 3 monomial, unbounded caps, matching order class), the
/// general descent otherwise.
fn dispatch(tasks: &[TaskSpec], params: &meco_core::SystemParams) -> Solver {
    let structured = params.model == EnergyModel::Monomial
        && params.monomial_order == 3.0
        && tasks.iter().all(|t| {
            let (r_min, r_max) = offload_bounds(t);
            r_min <= 0.0 && r_max >= t.data_bits
        });
    if structured {
        match classify_order(tasks) {
            OrderClass::Identical => return Solver::Ordered,
            OrderClass::Reverse => return Solver::Reverse,
            OrderClass::General => {}
        }
    }
    Solver::Bcd
}

fn cmd_solve(
    file: &Path,
    solver: Solver,
    tol: Option<f64>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let scenario = read_scenario(file)?;
    let (tasks, params) = (&scenario.tasks, &scenario.params);
    validate_tasks(tasks, params).map_err(|e| Failure::domain("invalid_instance", e.to_string()))?;

    let chosen = match solver {
        Solver::Auto => dispatch(tasks, params),
        explicit => explicit,
    };

    let solution = match chosen {
        Solver::Auto => unreachable!("dispatch never returns auto"),
        Solver::Bcd => {
            let timeline = build_timeline(tasks).map_err(Failure::from_solver)?;
            let mut opts = BcdOptions::default();
            if let Some(t) = tol {
                opts.tol = t;
            }
            let (alloc, report) =
                solve_bcd(tasks, params, &timeline, &opts).map_err(Failure::from_solver)?;
            SolutionFile {
                schema_version: SCHEMA_VERSION,
                solver: chosen.name(),
                tolerance: Some(opts.tol),
                objective_joules: report.objective_joules,
                iterations: Some(report.iterations),
                residuals: [
                    ("time_sharing", report.residual_time_sharing),
                    ("data_bounds", report.residual_data_bounds),
                ]
                .into_iter()
                .collect(),
                mobiles: solution::summaries_from_allocation(tasks, params, &alloc)
                    .map_err(Failure::from_solver)?,
                allocation: Some(solution::allocation_entries(&alloc)),
                schedule: None,
            }
        }
        Solver::Oracle => {
            let timeline = build_timeline(tasks).map_err(Failure::from_solver)?;
            let mut opts = OracleOptions::default();
            if let Some(t) = tol {
                opts.tol = t;
            }
            let (alloc, objective) =
                oracle_solve(tasks, params, &timeline, &opts).map_err(Failure::from_solver)?;
            let (time_sharing, data_bounds) =
                solution::allocation_residuals(tasks, &timeline, &alloc);
            SolutionFile {
                schema_version: SCHEMA_VERSION,
                solver: chosen.name(),
                tolerance: Some(opts.tol),
                objective_joules: objective,
                iterations: None,
                residuals: [("time_sharing", time_sharing), ("data_bounds", data_bounds)]
                    .into_iter()
                    .collect(),
                mobiles: solution::summaries_from_allocation(tasks, params, &alloc)
                    .map_err(Failure::from_solver)?,
                allocation: Some(solution::allocation_entries(&alloc)),
                schedule: None,
            }
        }
        Solver::Ordered => {
            let (schedule, master) = solve_identical(tasks, params).map_err(Failure::from_solver)?;
            SolutionFile {
                schema_version: SCHEMA_VERSION,
                solver: chosen.name(),
                tolerance: None,
                objective_joules: master.objective_joules,
                iterations: None,
                residuals: [
                    ("kkt_stationarity", master.kkt_stationarity),
                    ("kkt_complementarity", master.kkt_complementarity),
                    ("kkt_primal", master.kkt_primal),
                    ("kkt_dual", master.kkt_dual),
                ]
                .into_iter()
                .collect(),
                mobiles: solution::summaries_from_schedule(tasks, params, &schedule)
                    .map_err(Failure::from_solver)?,
                allocation: None,
                schedule: Some(solution::schedule_entries(&schedule)),
            }
        }
        Solver::Reverse => {
            let (two_phase, report) =
                solve_reverse(tasks, params).map_err(Failure::from_solver)?;
            let schedule = two_phase.to_schedule();
            SolutionFile {
                schema_version: SCHEMA_VERSION,
                solver: chosen.name(),
                tolerance: None,
                objective_joules: report.objective_joules,
                iterations: None,
                residuals: [("time_sharing", report.residual_time_sharing)]
                    .into_iter()
                    .collect(),
                mobiles: solution::summaries_from_schedule(tasks, params, &schedule)
                    .map_err(Failure::from_solver)?,
                allocation: None,
                schedule: Some(solution::schedule_entries(&schedule)),
            }
        }
    };

    let text = solution.to_json();
    match output {
        Some(path) => fs::write(path, text).map_err(|e| {
            Failure::domain("io", format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn print_summary<W: Write>(rows: &[ExperimentRow], mut w: W) {
    let _ = writeln!(
        w,
        "{:<20} {:>10} {:>18} {:>14} {:>14} {:>6} {:>6}",
        "sweep_var", "value", "policy", "mean_energy_j", "stderr", "ok", "fail"
    );
    for r in rows {
        let _ = writeln!(
            w,
            "{:<20} {:>10} {:>18} {:>14.6e} {:>14.6e} {:>6} {:>6}",
            r.sweep_var, r.value, r.policy, r.mean_energy_j, r.stderr_energy_j, r.realizations,
            r.failures
        );
    }
}

fn cmd_sweep(
    spec_path: &Path,
    output: Option<&Path>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<(), Failure> {
    let text = fs::read_to_string(spec_path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", spec_path.display())))?;
    let mut spec: SweepSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("sweep spec parse error: {e}")))?;
    if spec.values.is_empty() {
        return Err(Failure::usage("empty sweep values"));
    }
    if let Some(s) = seed {
        spec.base.seed = s;
    }
    if let Some(j) = jobs {
        // Fails only if a global pool already exists, which keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }

    let rows = run_sweep(&spec).map_err(|e| Failure::domain("sweep_failure", e.to_string()))?;

    match output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| {
                Failure::domain("io", format!("cannot write {}: {e}", path.display()))
            })?;
            write_csv(&rows, file).map_err(|e| Failure::domain("io", e.to_string()))?;
            print_summary(&rows, std::io::stdout());
        }
        None => {
            write_csv(&rows, std::io::stdout())
                .map_err(|e| Failure::domain("io", e.to_string()))?;
            print_summary(&rows, std::io::stderr());
        }
    }

    let dead: Vec<(f64, &str)> = rows
        .iter()
        .filter(|r| r.realizations == 0)
        .map(|r| (r.value, r.policy))
        .collect();
    if dead.is_empty() {
        Ok(())
    } else {
        Err(Failure::domain(
            "all_realizations_failed",
            format!("every realization failed at sweep points {dead:?}"),
        ))
    }
}
