//! Reverse arrival-deadline order solver. A deadline-alignment migration
//! turns the instance into an identical-order one (preserving every latency
//! T_k and the time-sharing overlaps), the migrated instance is solved by the
//! ordered master problem, and reverse-order scheduling then places one or
//! two transmission intervals per mobile against the original windows.

use crate::bcd::SolveReport;
use crate::energy::{mobile_coeffs, SystemParams};
use crate::error::{Error, Result};
use crate::ordered::{slave_partition, solve_master, Interval, Schedule, OFFLOAD_EPS};
use crate::timeline::TaskSpec;

/// Reverse instance transformed to a common deadline.
#[derive(Debug, Clone, PartialEq)]
pub struct MigratedInstance {
    pub tasks: Vec<TaskSpec>,
    /// Migration shifts `delta_k = T_1^(d) - T_k^(d)`, kept for inversion.
    pub deltas: Vec<f64>,
}

/// Per-mobile primary and secondary transmission intervals. Empty secondary
/// intervals are zero-length placeholders at the stack position; they are
/// pruned when exporting a `Schedule`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseSchedule {
    pub primary: Vec<Interval>,
    pub secondary: Vec<Interval>,
    /// Transform-phase durations and bit totals.
    pub durations: Vec<f64>,
    pub bits: Vec<f64>,
}

impl TwoPhaseSchedule {
    /// Export as a plain schedule in the palindromic order, dropping empty
    /// intervals.
    pub fn to_schedule(&self) -> Schedule {
        let k = self.primary.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.extend((0..k.saturating_sub(1)).rev());
        let mut intervals = vec![Vec::new(); k];
        for (i, iv) in self.primary.iter().enumerate() {
            if !iv.is_empty() {
                intervals[i].push(*iv);
            }
        }
        for (i, iv) in self.secondary.iter().enumerate() {
            if !iv.is_empty() {
                intervals[i].push(*iv);
            }
        }
        Schedule { order, intervals }
    }
}

fn is_reverse_shape(tasks: &[TaskSpec]) -> bool {
    tasks.windows(2).all(|w| {
        w[0].arrival <= w[1].arrival && w[0].deadline >= w[1].deadline
    })
}

/// Deadline-alignment migration: shift every window right by
/// `delta_k = T_1^(d) - T_k^(d)` so all deadlines coincide.
pub fn migrate_deadlines(tasks: &[TaskSpec]) -> Result<MigratedInstance> {
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    if !is_reverse_shape(tasks) {
        return Err(Error::OrderMismatch { expected: "reverse" });
    }
    let common = tasks[0].deadline;
    let mut migrated = Vec::with_capacity(tasks.len());
    let mut deltas = Vec::with_capacity(tasks.len());
    for task in tasks {
        let delta = common - task.deadline;
        let mut t = task.clone();
        t.arrival += delta;
        t.deadline = common;
        migrated.push(t);
        deltas.push(delta);
    }
    Ok(MigratedInstance {
        tasks: migrated,
        deltas,
    })
}

/// Optimal scheduling order for reverse instances: `1..K` then `K-1..1`.
pub fn optimal_order_reverse(tasks: &[TaskSpec]) -> Result<Vec<usize>> {
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    if !is_reverse_shape(tasks) {
        return Err(Error::OrderMismatch { expected: "reverse" });
    }
    let k = tasks.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.extend((0..k - 1).rev());
    Ok(order)
}

/// Reverse-order scheduling: anchor mobile K at its deadline, then walk
/// k = K-1 .. 1 placing each primary interval immediately before its
/// successor's start, spilling any arrival-blocked remainder onto a
/// secondary stack that grows upward from `T_K^(d)`.
pub fn schedule_reverse_order(
    durations: &[f64],
    bits: &[f64],
    tasks: &[TaskSpec],
) -> Result<TwoPhaseSchedule> {
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    let k = tasks.len();
    let total: f64 = durations.iter().sum();
    if total > tasks[0].deadline + 1e-9 * tasks[0].deadline.max(1.0) {
        return Err(Error::ScheduleOverflow {
            id: tasks[0].id,
            start: 0.0,
            end: total,
        });
    }

    let mut primary = vec![
        Interval {
            start: 0.0,
            end: 0.0,
            bits: 0.0
        };
        k
    ];
    let mut secondary = primary.clone();

    let last = k - 1;
    let y_e = tasks[last].deadline;
    let y_s = y_e - durations[last];
    if y_s < tasks[last].arrival - 1e-12 {
        return Err(Error::ScheduleOverflow {
            id: tasks[last].id,
            start: y_s,
            end: y_e,
        });
    }
    primary[last] = Interval {
        start: y_s,
        end: y_e,
        bits: bits[last],
    };
    secondary[last] = Interval {
        start: y_e,
        end: y_e,
        bits: 0.0,
    };

    let mut next_y_s = y_s;
    let mut z_top = y_e;
    for i in (0..last).rev() {
        let y_e = next_y_s;
        let delta = y_e - durations[i];
        let (y_s, spill) = if delta >= tasks[i].arrival {
            (delta, 0.0)
        } else {
            (tasks[i].arrival, tasks[i].arrival - delta)
        };
        if y_s > y_e + 1e-12 {
            return Err(Error::ScheduleOverflow {
                id: tasks[i].id,
                start: y_s,
                end: y_e,
            });
        }
        let z = Interval {
            start: z_top,
            end: z_top + spill,
            bits: 0.0,
        };
        if z.end > tasks[i].deadline + 1e-12 {
            return Err(Error::ScheduleOverflow {
                id: tasks[i].id,
                start: z.start,
                end: z.end,
            });
        }
        // Step 4: bits proportional to interval lengths.
        let (b1, b2) = if durations[i] > OFFLOAD_EPS {
            (
                (y_e - y_s) / durations[i] * bits[i],
                spill / durations[i] * bits[i],
            )
        } else {
            (0.0, 0.0)
        };
        primary[i] = Interval {
            start: y_s,
            end: y_e.max(y_s),
            bits: b1,
        };
        secondary[i] = Interval { bits: b2, ..z };
        next_y_s = y_s;
        z_top = z.end;
    }

    Ok(TwoPhaseSchedule {
        primary,
        secondary,
        durations: durations.to_vec(),
        bits: bits.to_vec(),
    })
}

/// Full reverse-order solve: migrate, solve the identical-order master on
/// the transformed instance, then schedule against the original windows.
pub fn solve_reverse(
    tasks: &[TaskSpec],
    params: &SystemParams,
) -> Result<(TwoPhaseSchedule, SolveReport)> {
    let migrated = migrate_deadlines(tasks)?;
    let master = solve_master(&migrated.tasks, params)?;
    let mut bits = Vec::with_capacity(tasks.len());
    for (task, &t) in tasks.iter().zip(&master.durations) {
        let coeffs = mobile_coeffs(task, params)?;
        let (l, _) = slave_partition(&coeffs, task, params, t)?;
        bits.push(l);
    }
    let schedule = schedule_reverse_order(&master.durations, &bits, tasks)?;
    let report = SolveReport {
        objective_joules: master.objective_joules,
        iterations: 1,
        objective_trace: vec![master.objective_joules],
        converged: true,
        residual_time_sharing: master.kkt_primal,
        residual_data_bounds: 0.0,
    };
    Ok((schedule, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergyModel;
    use crate::timeline::{classify_order, OrderClass};
    use approx::assert_relative_eq;

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

    fn mk(id: usize, arrival: f64, deadline: f64, bits: f64) -> TaskSpec {
        TaskSpec {
            id,
            arrival,
            deadline,
            data_bits: bits,
            cycles_per_bit: 1000.0,
            max_cpu_freq: 1e12,
            vm_cap_cycles: 1e15,
            channel_gain: 1e-3,
        }
    }

    #[test]
    fn migration_aligns_deadlines() {
        // Single mobile: unchanged.
        let one = vec![mk(0, 0.0, 5.0, 1e4)];
        let m = migrate_deadlines(&one).unwrap();
        assert_eq!(m.deltas, vec![0.0]);
        assert_eq!(m.tasks, one);

        let two = vec![mk(0, 0.0, 10.0, 1e4), mk(1, 1.0, 8.0, 1e4)];
        let m = migrate_deadlines(&two).unwrap();
        assert_eq!(m.deltas, vec![0.0, 2.0]);
        assert_eq!(m.tasks[1].arrival, 3.0);
        assert_eq!(m.tasks[1].deadline, 10.0);
        assert_eq!(classify_order(&m.tasks), OrderClass::Identical);
        // Latencies preserved.
        assert_eq!(m.tasks[1].latency(), two[1].latency());

        let not_reverse = vec![mk(0, 0.0, 5.0, 1e4), mk(1, 1.0, 8.0, 1e4)];
        assert!(migrate_deadlines(&not_reverse).is_err());
    }

    #[test]
    fn palindromic_order() {
        let tasks = vec![
            mk(0, 0.0, 10.0, 1e4),
            mk(1, 1.0, 9.0, 1e4),
            mk(2, 2.0, 8.0, 1e4),
        ];
        assert_eq!(optimal_order_reverse(&tasks).unwrap(), vec![0, 1, 2, 1, 0]);
        assert_eq!(optimal_order_reverse(&tasks[..1]).unwrap(), vec![0]);
        assert_eq!(optimal_order_reverse(&tasks[..2]).unwrap(), vec![0, 1, 0]);
    }

    #[test]
    fn scheduling_trace_no_splits() {
        let tasks = vec![
            mk(0, 0.0, 10.0, 1e4),
            mk(1, 1.0, 9.0, 1e4),
            mk(2, 2.0, 8.0, 1e4),
        ];
        let sched = schedule_reverse_order(&[2.0, 1.0, 1.0], &[1e3, 1e3, 1e3], &tasks).unwrap();
        assert_eq!(sched.primary[2].start, 7.0);
        assert_eq!(sched.primary[2].end, 8.0);
        assert_eq!(sched.primary[1].start, 6.0);
        assert_eq!(sched.primary[1].end, 7.0);
        assert_eq!(sched.primary[0].start, 4.0);
        assert_eq!(sched.primary[0].end, 6.0);
        assert!(sched.secondary.iter().all(|z| z.is_empty()));
        assert_eq!(sched.primary[0].bits, 1e3);
    }

    #[test]
    fn scheduling_trace_with_arrival_spill() {
        // Mobile 2's late arrival (6.5) blocks part of its slot before the
        // last mobile; the remainder stacks above the final deadline.
        let tasks = vec![
            mk(0, 0.0, 10.0, 1e4),
            mk(1, 6.5, 9.0, 1e4),
            mk(2, 6.6, 8.0, 1e4),
        ];
        let sched = schedule_reverse_order(&[2.0, 1.0, 1.0], &[2e3, 1e3, 1e3], &tasks).unwrap();
        assert_eq!(sched.primary[2].start, 7.0);
        assert_eq!(sched.primary[2].end, 8.0);
        assert_eq!(sched.primary[1].start, 6.5);
        assert_eq!(sched.primary[1].end, 7.0);
        assert_eq!(sched.secondary[1].start, 8.0);
        assert_eq!(sched.secondary[1].end, 8.5);
        // Step 4 proportional split: half the airtime in each interval.
        assert_relative_eq!(sched.primary[1].bits, 500.0, max_relative = 1e-12);
        assert_relative_eq!(sched.secondary[1].bits, 500.0, max_relative = 1e-12);
        // Mobile 1 follows below mobile 2's primary.
        assert_eq!(sched.primary[0].start, 4.5);
        assert_eq!(sched.primary[0].end, 6.5);
        assert!(sched.secondary[0].is_empty());
        // Duration and bit conservation.
        for k in 0..3 {
            assert_relative_eq!(
                sched.primary[k].len() + sched.secondary[k].len(),
                sched.durations[k],
                max_relative = 1e-12
            );
            assert_relative_eq!(
                sched.primary[k].bits + sched.secondary[k].bits,
                sched.bits[k],
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn zero_durations_give_empty_schedule() {
        let tasks = vec![mk(0, 0.0, 10.0, 0.0), mk(1, 1.0, 8.0, 0.0)];
        let sched = schedule_reverse_order(&[0.0, 0.0], &[0.0, 0.0], &tasks).unwrap();
        let exported = sched.to_schedule();
        assert!(exported.intervals.iter().all(|v| v.is_empty()));
    }

    #[test]
    fn overflow_is_detected() {
        let tasks = vec![mk(0, 0.0, 3.0, 1e4), mk(1, 2.9, 3.0, 1e4)];
        // Mobile 2's spill would land past its own deadline.
        assert!(matches!(
            schedule_reverse_order(&[2.9, 2.0], &[1e3, 1e3], &tasks),
            Err(Error::ScheduleOverflow { .. })
        ));
    }

    #[test]
    fn solve_reverse_single_mobile() {
        let p = params();
        let tasks = vec![mk(0, 0.0, 4.0, 3e4)];
        let (sched, report) = solve_reverse(&tasks, &p).unwrap();
        assert_eq!(sched.primary[0].end, 4.0);
        assert_relative_eq!(sched.primary[0].len(), 4.0, max_relative = 1e-12);
        assert!(sched.secondary[0].is_empty());
        assert!(report.objective_joules > 0.0);
    }

    #[test]
    fn energy_preserved_through_scheduling() {
        use crate::energy::{local_energy, objective, offload_energy};
        use crate::timeline::build_timeline;

        let p = params();
        let tasks = vec![
            mk(0, 0.0, 6.0, 4e4),
            mk(1, 0.5, 5.0, 5e4),
            mk(2, 1.5, 4.0, 3e4),
        ];
        let (sched, report) = solve_reverse(&tasks, &p).unwrap();

        // Direct interval evaluation.
        let mut direct = 0.0;
        for (k, task) in tasks.iter().enumerate() {
            direct += local_energy(task, &p, sched.bits[k]).unwrap();
            for iv in [&sched.primary[k], &sched.secondary[k]] {
                if !iv.is_empty() {
                    direct += offload_energy(task, &p, iv.bits, iv.len()).unwrap();
                }
            }
        }
        assert_relative_eq!(direct, report.objective_joules, max_relative = 1e-10);

        // Epoch-projected evaluation through the shared objective.
        let tl = build_timeline(&tasks).unwrap();
        let alloc = crate::ordered::schedule_to_allocation(&sched.to_schedule(), &tl);
        let via_alloc = objective(&tasks, &p, &tl, &alloc).unwrap();
        assert_relative_eq!(via_alloc, report.objective_joules, max_relative = 1e-10);

        // Intervals stay inside the original windows and never overlap.
        let mut all: Vec<(f64, f64)> = Vec::new();
        for (k, task) in tasks.iter().enumerate() {
            for iv in [&sched.primary[k], &sched.secondary[k]] {
                if !iv.is_empty() {
                    assert!(iv.start >= task.arrival);
                    assert!(iv.end <= task.deadline);
                    all.push((iv.start, iv.end));
                }
            }
        }
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in all.windows(2) {
            assert!(w[0].1 <= w[1].0 + 1e-12);
        }
    }

    #[test]
    fn exported_order_reads_as_palindrome() {
        let p = params();
        let tasks = vec![
            mk(0, 0.0, 6.0, 4e4),
            mk(1, 2.0, 5.0, 5e4),
            mk(2, 4.5, 4.8, 3e4),
        ];
        let (sched, _) = solve_reverse(&tasks, &p).unwrap();
        let mut seq: Vec<(f64, usize)> = Vec::new();
        for (k, iv) in sched.primary.iter().enumerate() {
            if !iv.is_empty() {
                seq.push((iv.start, k));
            }
        }
        let split = seq.len();
        for (k, iv) in sched.secondary.iter().enumerate() {
            if !iv.is_empty() {
                seq.push((iv.start, k));
            }
        }
        seq.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // Prefix ascending mobile indices, suffix descending.
        let prefix = &seq[..split];
        let suffix = &seq[split..];
        assert!(prefix.windows(2).all(|w| w[0].1 < w[1].1));
        assert!(suffix.windows(2).all(|w| w[0].1 > w[1].1));
    }
}
