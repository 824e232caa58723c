//! Energy-minimal resource management for asynchronous multiuser computation
//! offloading over a TDMA uplink. Mobiles with heterogeneous arrival instants
//! and deadlines split their input data between local computing and
//! offloading; the solvers jointly choose the data partition and the
//! per-epoch transmission durations to minimize total mobile energy.
//!
//! Solver selection by instance shape:
//! - general arrival-deadline orders: [`bcd::solve_bcd`], block coordinate
//!   descent with exact convex half-steps;
//! - identical orders (m = 3, unbounded caps): [`ordered::solve_identical`],
//!   the sequential scheduling/master-problem solver;
//! - reverse orders: [`reverse::solve_reverse`], deadline-alignment migration
//!   plus reverse-order scheduling.
//!
//! [`oracle`] provides an independent projected-gradient solver used only for
//! cross-checking, and [`harness`] drives seeded Monte Carlo experiments.

pub mod bcd;
pub mod energy;
pub mod error;
pub mod harness;
pub mod lambert;
pub mod oracle;
pub mod ordered;
pub mod reverse;
pub mod scenario;
pub mod timeline;

pub use bcd::{solve_bcd, BcdOptions, SolveReport};
pub use energy::{objective, Allocation, EnergyModel, SystemParams};
pub use error::{Error, Result};
pub use ordered::{solve_identical, solve_master, MasterSolution, Schedule};
pub use reverse::{solve_reverse, TwoPhaseSchedule};
pub use scenario::ScenarioFile;
pub use timeline::{build_timeline, classify_order, validate_tasks, OrderClass, TaskSpec, Timeline};
