//! Error types shared across the solver crate.

use thiserror::Error;

use crate::bcd::SolveReport;
use crate::energy::Allocation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("task list is empty")]
    EmptyTaskList,

    #[error("task {id}: {reason}")]
    InvalidTask { id: usize, reason: String },

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("mobile {id} is infeasible: required offload {r_min} bits exceeds cap {r_max} bits")]
    InfeasibleInstance { id: usize, r_min: f64, r_max: f64 },

    #[error("mobile {id}: {bits} offloaded bits assigned with zero duration in epoch {epoch}")]
    BitsWithoutTime { id: usize, epoch: usize, bits: f64 },

    #[error("offloaded total {offloaded} bits exceeds task data size {data_bits} bits")]
    OffloadExceedsData { offloaded: f64, data_bits: f64 },

    #[error("mobile {id} must offload at least {r_min} bits but has no positive-duration epoch")]
    NoAirtime { id: usize, r_min: f64 },

    #[error("empty offloader set for time division")]
    EmptyOffloaderSet,

    #[error("non-positive duration or bit load passed to a closed-form step: {0}")]
    NonPositiveInput(String),

    #[error("solver did not converge within {max_iters} iterations")]
    NonConvergence {
        max_iters: usize,
        best: Box<(Allocation, SolveReport)>,
    },

    #[error("multiplier bracketing failed on [{lo}, {hi}]: {context}")]
    BracketingFailure { lo: f64, hi: f64, context: String },

    #[error("Lambert W argument {0} is below -1/e")]
    LambertDomain(f64),

    #[error("instance is not in {expected} arrival-deadline order")]
    OrderMismatch { expected: &'static str },

    #[error("solver requires monomial order m = 3, got m = {0}")]
    UnsupportedMonomialOrder(f64),

    #[error("mobile {id} has bounded computation caps; route this instance to the general solver")]
    BoundedCaps { id: usize },

    #[error("infeasible arrival-deadline chain: mobile {k} deadline {deadline} precedes mobile {next} arrival {arrival}")]
    InfeasibleChain {
        k: usize,
        next: usize,
        deadline: f64,
        arrival: f64,
    },

    #[error("reverse-order scheduling overflow: mobile {id} interval [{start}, {end}] escapes its window")]
    ScheduleOverflow { id: usize, start: f64, end: f64 },

    #[error("instance too large for this routine: {0}")]
    InstanceTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
