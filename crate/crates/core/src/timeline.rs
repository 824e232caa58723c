//! Task validation and the epoch/user-set structure.
//!
//! The planning horizon is cut at every arrival and deadline instant. The
//! interval between two consecutive cut points is an *epoch*. Each mobile `k`
//! owns an epoch-set `A_k` (the epochs covered by its computing window) and
//! each epoch `n` owns a user-set `B_n` (the mobiles whose windows cover it).
//! All solvers in this crate operate on this structure.

use serde::{Deserialize, Serialize};

use crate::energy::SystemParams;
use crate::error::{Error, Result};

/// One mobile's computation task. All quantities are SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    /// Mobile index `k` (0-based).
    pub id: usize,
    /// Input-data arrival instant, seconds.
    pub arrival: f64,
    /// Computation deadline, seconds. Must exceed `arrival`.
    pub deadline: f64,
    /// Input data size `L_k`, bits.
    pub data_bits: f64,
    /// CPU cycles required per input bit, `C_k`.
    pub cycles_per_bit: f64,
    /// Maximum local CPU frequency `F_k`, cycles/second.
    pub max_cpu_freq: f64,
    /// Cap on offloaded CPU cycles at the edge cloud, `D_k`.
    pub vm_cap_cycles: f64,
    /// Channel power gain `g_k`, dimensionless.
    pub channel_gain: f64,
}

impl TaskSpec {
    /// Computing window length `T_k = deadline - arrival`, seconds.
    pub fn latency(&self) -> f64 {
        self.deadline - self.arrival
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| Error::InvalidTask {
            id: self.id,
            reason: reason.to_string(),
        };
        if !self.arrival.is_finite() || self.arrival < 0.0 {
            return Err(fail("arrival must be finite and nonnegative"));
        }
        if !self.deadline.is_finite() || self.deadline <= self.arrival {
            return Err(fail("deadline must exceed arrival"));
        }
        if !self.data_bits.is_finite() || self.data_bits < 0.0 {
            return Err(fail("data_bits must be nonnegative"));
        }
        if !(self.cycles_per_bit > 0.0) {
            return Err(fail("cycles_per_bit must be positive"));
        }
        if !(self.channel_gain > 0.0) {
            return Err(fail("channel_gain must be positive"));
        }
        if !self.max_cpu_freq.is_finite() || self.max_cpu_freq < 0.0 {
            return Err(fail("max_cpu_freq must be nonnegative"));
        }
        if !self.vm_cap_cycles.is_finite() || self.vm_cap_cycles < 0.0 {
            return Err(fail("vm_cap_cycles must be nonnegative"));
        }
        Ok(())
    }
}

/// Epoch decomposition of the horizon (Definition 1 structure).
///
/// `boundaries` is the sorted multiset of all arrivals and deadlines, so with
/// `K` tasks there are `N = 2K - 1` epochs. Zero-length epochs from duplicate
/// instants are kept so that index bookkeeping stays exact; solvers assign
/// them zero duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    /// Sorted instants `s_0 <= s_1 <= ... <= s_N`, seconds.
    pub boundaries: Vec<f64>,
    /// Epoch lengths `tau_n = s_{n+1} - s_n` (0-based epoch index).
    pub epoch_lengths: Vec<f64>,
    /// `epoch_sets[k]` = sorted epoch indices covered by mobile `k`'s window.
    pub epoch_sets: Vec<Vec<usize>>,
    /// `user_sets[n]` = sorted mobile indices whose windows cover epoch `n`.
    pub user_sets: Vec<Vec<usize>>,
}

impl Timeline {
    pub fn num_epochs(&self) -> usize {
        self.epoch_lengths.len()
    }

    pub fn num_mobiles(&self) -> usize {
        self.epoch_sets.len()
    }
}

/// Relation between the arrival order and the deadline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderClass {
    General,
    Identical,
    Reverse,
}

/// Per-mobile feasibility bounds for the offloaded data size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobileFeasibility {
    pub id: usize,
    /// `R_k^(min) = max(L_k - T_k F_k / C_k, 0)`, bits.
    pub r_min_bits: f64,
    /// `R_k^(max) = min(L_k, D_k / C_k)`, bits.
    pub r_max_bits: f64,
    pub feasible: bool,
}

/// Advisory report; solvers re-check and fail fast on infeasible mobiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub mobiles: Vec<MobileFeasibility>,
    /// Whether every consecutive pair satisfies the window-overlap assumption
    /// `deadline_k > arrival_{k+1}` (tasks in arrival order). When violated
    /// the instance decouples into independent stretches; we still solve it
    /// as one instance and only report the violation.
    pub overlap_assumption_holds: bool,
}

impl FeasibilityReport {
    pub fn all_feasible(&self) -> bool {
        self.mobiles.iter().all(|m| m.feasible)
    }
}

/// Build the epoch/user-set structure for a task set sorted by arrival.
///
/// At equal time values arrivals sort before deadlines, so a deadline that
/// coincides with another mobile's arrival yields a zero-length shared epoch
/// rather than a spurious overlap.
pub fn build_timeline(tasks: &[TaskSpec]) -> Result<Timeline> {
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    for t in tasks {
        t.validate()?;
    }

    // (time, kind): kind 0 = arrival, 1 = deadline.
    let mut instants: Vec<(f64, u8)> = Vec::with_capacity(2 * tasks.len());
    for t in tasks {
        instants.push((t.arrival, 0));
        instants.push((t.deadline, 1));
    }
    instants.sort_by(|a, b| a.partial_cmp(b).expect("finite instants"));

    let boundaries: Vec<f64> = instants.into_iter().map(|(s, _)| s).collect();
    let n_epochs = boundaries.len() - 1;
    let epoch_lengths: Vec<f64> = (0..n_epochs)
        .map(|n| boundaries[n + 1] - boundaries[n])
        .collect();

    let mut epoch_sets = vec![Vec::new(); tasks.len()];
    let mut user_sets = vec![Vec::new(); n_epochs];
    for (k, t) in tasks.iter().enumerate() {
        for n in 0..n_epochs {
            if boundaries[n] >= t.arrival && boundaries[n + 1] <= t.deadline {
                epoch_sets[k].push(n);
                user_sets[n].push(k);
            }
        }
    }

    Ok(Timeline {
        boundaries,
        epoch_lengths,
        epoch_sets,
        user_sets,
    })
}

/// Report per-mobile feasibility and the window-overlap assumption.
/// Never mutates inputs; solvers perform their own hard checks.
pub fn validate_tasks(tasks: &[TaskSpec], params: &SystemParams) -> Result<FeasibilityReport> {
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    params.validate()?;
    let mut mobiles = Vec::with_capacity(tasks.len());
    for t in tasks {
        t.validate()?;
        let (r_min, r_max) = offload_bounds(t);
        mobiles.push(MobileFeasibility {
            id: t.id,
            r_min_bits: r_min,
            r_max_bits: r_max,
            feasible: r_min <= r_max,
        });
    }
    let overlap = tasks
        .windows(2)
        .all(|w| w[0].deadline > w[1].arrival);
    Ok(FeasibilityReport {
        mobiles,
        overlap_assumption_holds: overlap,
    })
}

/// `(R_k^(min), R_k^(max))` in bits for one task.
pub fn offload_bounds(task: &TaskSpec) -> (f64, f64) {
    let r_min = (task.data_bits - task.latency() * task.max_cpu_freq / task.cycles_per_bit).max(0.0);
    let r_max = task.data_bits.min(task.vm_cap_cycles / task.cycles_per_bit);
    (r_min, r_max)
}

/// Classify the arrival-deadline order of a task set sorted by arrival.
/// A fully tied instance classifies as `Identical`.
pub fn classify_order(tasks: &[TaskSpec]) -> OrderClass {
    let nondecreasing = tasks.windows(2).all(|w| w[0].deadline <= w[1].deadline);
    if nondecreasing {
        return OrderClass::Identical;
    }
    let nonincreasing = tasks.windows(2).all(|w| w[0].deadline >= w[1].deadline);
    if nonincreasing {
        return OrderClass::Reverse;
    }
    OrderClass::General
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{EnergyModel, SystemParams};

    fn task(id: usize, arrival: f64, deadline: f64) -> TaskSpec {
        TaskSpec {
            id,
            arrival,
            deadline,
            data_bits: 1e4,
            cycles_per_bit: 1000.0,
            max_cpu_freq: 1e9,
            vm_cap_cycles: 1e9,
            channel_gain: 1e-3,
        }
    }

    fn params() -> SystemParams {
        SystemParams {
            lambda_coeff: 1e-25,
            gamma_switch: 1e-28,
            monomial_order: 3.0,
            bandwidth_hz: 1e6,
            noise_power: 1e-9,
            model: EnergyModel::Monomial,
        }
    }

    #[test]
    fn three_mobile_reference_instance() {
        // Arrivals (0,3,4), deadlines (5,7,6).
        let tasks = vec![task(0, 0.0, 5.0), task(1, 3.0, 7.0), task(2, 4.0, 6.0)];
        let tl = build_timeline(&tasks).unwrap();
        assert_eq!(tl.boundaries, vec![0.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assert_eq!(tl.num_epochs(), 5); // N = 2K - 1
        // Paper's 1-based sets, shifted to 0-based epochs.
        assert_eq!(tl.epoch_sets[0], vec![0, 1, 2]); // A_1 = {1,2,3}
        assert_eq!(tl.epoch_sets[1], vec![1, 2, 3, 4]); // A_2 = {2,3,4,5}
        assert_eq!(tl.epoch_sets[2], vec![2, 3]); // A_3 = {3,4}
        assert_eq!(tl.user_sets[1], vec![0, 1]); // B_2 = {1,2}
        assert_eq!(tl.user_sets[2], vec![0, 1, 2]); // B_3 = {1,2,3}
    }

    #[test]
    fn single_task_degenerate() {
        let tasks = vec![task(0, 0.0, 5.0)];
        let tl = build_timeline(&tasks).unwrap();
        assert_eq!(tl.boundaries, vec![0.0, 5.0]);
        assert_eq!(tl.epoch_lengths, vec![5.0]);
        assert_eq!(tl.epoch_sets[0], vec![0]);
        assert_eq!(tl.user_sets[0], vec![0]);
    }

    #[test]
    fn rejects_empty_and_bad_deadline() {
        assert!(matches!(build_timeline(&[]), Err(Error::EmptyTaskList)));
        let bad = vec![task(0, 5.0, 5.0)];
        assert!(build_timeline(&bad).is_err());
    }

    #[test]
    fn zero_length_epochs_retained() {
        // Mobile 0's deadline coincides with mobile 1's arrival.
        let tasks = vec![task(0, 0.0, 2.0), task(1, 2.0, 4.0)];
        let tl = build_timeline(&tasks).unwrap();
        assert_eq!(tl.boundaries, vec![0.0, 2.0, 2.0, 4.0]);
        assert_eq!(tl.epoch_lengths, vec![2.0, 0.0, 2.0]);
        // Arrival sorted before deadline at the tie: the zero-length epoch is
        // [2,2] and is covered by both windows.
        assert_eq!(tl.epoch_lengths[1], 0.0);
        assert!(tl.user_sets[1].contains(&0) && tl.user_sets[1].contains(&1));
    }

    #[test]
    fn epoch_user_set_duality_and_coverage() {
        let tasks = vec![task(0, 0.0, 5.0), task(1, 3.0, 7.0), task(2, 4.0, 6.0)];
        let tl = build_timeline(&tasks).unwrap();
        // k in B_n iff n in A_k.
        for (k, set) in tl.epoch_sets.iter().enumerate() {
            for n in 0..tl.num_epochs() {
                assert_eq!(set.contains(&n), tl.user_sets[n].contains(&k));
            }
        }
        // Sum of owned epoch lengths equals each window length.
        for (k, t) in tasks.iter().enumerate() {
            let total: f64 = tl.epoch_sets[k].iter().map(|&n| tl.epoch_lengths[n]).sum();
            assert!((total - t.latency()).abs() < 1e-12);
        }
    }

    #[test]
    fn feasibility_formulas() {
        // L = 1e5, C = 1000, T = 0.5, F = 1e9, D = 1e9:
        // R_min = max(1e5 - 5e5, 0) = 0, R_max = min(1e5, 1e6) = 1e5.
        let t = TaskSpec {
            id: 0,
            arrival: 0.0,
            deadline: 0.5,
            data_bits: 1e5,
            cycles_per_bit: 1000.0,
            max_cpu_freq: 1e9,
            vm_cap_cycles: 1e9,
            channel_gain: 1e-3,
        };
        let rep = validate_tasks(&[t.clone()], &params()).unwrap();
        assert_eq!(rep.mobiles[0].r_min_bits, 0.0);
        assert_eq!(rep.mobiles[0].r_max_bits, 1e5);
        assert!(rep.all_feasible());

        // No compute resource anywhere: infeasible.
        let mut dead = t.clone();
        dead.max_cpu_freq = 0.0;
        dead.vm_cap_cycles = 0.0;
        let rep = validate_tasks(&[dead], &params()).unwrap();
        assert!(!rep.mobiles[0].feasible);
        assert_eq!(rep.mobiles[0].r_min_bits, 1e5);
        assert_eq!(rep.mobiles[0].r_max_bits, 0.0);

        // Unbounded capacities: trivially feasible.
        let mut roomy = t;
        roomy.max_cpu_freq = 1e15;
        roomy.vm_cap_cycles = 1e18;
        let rep = validate_tasks(&[roomy], &params()).unwrap();
        assert_eq!(rep.mobiles[0].r_min_bits, 0.0);
        assert_eq!(rep.mobiles[0].r_max_bits, 1e5);
    }

    #[test]
    fn overlap_assumption_reported() {
        let tasks = vec![task(0, 0.0, 1.0), task(1, 2.0, 3.0)];
        let rep = validate_tasks(&tasks, &params()).unwrap();
        assert!(!rep.overlap_assumption_holds);
    }

    #[test]
    fn order_classification() {
        let mk = |ds: &[f64], ars: &[f64]| -> Vec<TaskSpec> {
            ds.iter()
                .zip(ars)
                .enumerate()
                .map(|(i, (&d, &a))| task(i, a, d))
                .collect()
        };
        assert_eq!(
            classify_order(&mk(&[5.0, 6.0, 7.0], &[0.0, 1.0, 2.0])),
            OrderClass::Identical
        );
        assert_eq!(
            classify_order(&mk(&[7.0, 6.0, 5.0], &[0.0, 1.0, 2.0])),
            OrderClass::Reverse
        );
        assert_eq!(
            classify_order(&mk(&[5.0, 7.0, 6.0], &[0.0, 3.0, 4.0])),
            OrderClass::General
        );
        // Fully tied deadlines classify as identical.
        assert_eq!(
            classify_order(&mk(&[5.0, 5.0, 5.0], &[0.0, 1.0, 2.0])),
            OrderClass::Identical
        );
    }

    #[test]
    fn build_is_deterministic() {
        let tasks = vec![task(0, 0.0, 5.0), task(1, 3.0, 7.0), task(2, 4.0, 6.0)];
        assert_eq!(build_timeline(&tasks).unwrap(), build_timeline(&tasks).unwrap());
    }
}
