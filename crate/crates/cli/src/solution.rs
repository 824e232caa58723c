//! Solution-file schema: a versioned JSON document carrying the solver
//! identity, objective, residuals, per-mobile energy split, and either the
//! per-(mobile, epoch) allocation or the interval schedule. Serialization is
//! deterministic — maps are ordered and no timestamps are embedded — so equal
//! inputs produce byte-identical files.

use std::collections::BTreeMap;

use serde::Serialize;

use meco_core::energy::{local_energy, offload_energy, Allocation, SystemParams};
use meco_core::ordered::Schedule;
use meco_core::timeline::{offload_bounds, TaskSpec, Timeline};
use meco_core::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Per-mobile totals and energy split.
#[derive(Debug, Clone, Serialize)]
pub struct MobileSummary {
    pub id: usize,
    pub offloaded_bits: f64,
    pub local_energy_j: f64,
    pub offload_energy_j: f64,
}

/// One (mobile, epoch) cell of an epoch-grid allocation.
#[derive(Debug, Clone, Serialize)]
pub struct AllocationEntry {
    pub mobile: usize,
    pub epoch: usize,
    pub bits: f64,
    pub duration_s: f64,
}

/// One transmission interval of a sequential schedule.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleEntry {
    pub mobile: usize,
    pub start_s: f64,
    pub end_s: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub solver: &'static str,
    /// Convergence tolerance in effect; absent for direct solvers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub objective_joules: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub residuals: BTreeMap<&'static str, f64>,
    pub mobiles: Vec<MobileSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allocation: Option<Vec<AllocationEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<ScheduleEntry>>,
}

impl SolutionFile {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("solution serialization cannot fail");
        text.push('\n');
        text
    }
}

pub fn summaries_from_allocation(
    tasks: &[TaskSpec],
    params: &SystemParams,
    alloc: &Allocation,
) -> Result<Vec<MobileSummary>> {
    let mut summaries = Vec::with_capacity(tasks.len());
    for (k, task) in tasks.iter().enumerate() {
        let mut offloaded = 0.0;
        let mut tx = 0.0;
        for ((_, _), &bits) in alloc.bits.range((k, 0)..(k + 1, 0)) {
            offloaded += bits;
        }
        for (&(_, n), &dur) in alloc.durations.range((k, 0)..(k + 1, 0)) {
            let bits = alloc.bits.get(&(k, n)).copied().unwrap_or(0.0);
            tx += offload_energy(task, params, bits, dur)?;
        }
        summaries.push(MobileSummary {
            id: task.id,
            offloaded_bits: offloaded,
            local_energy_j: local_energy(task, params, offloaded)?,
            offload_energy_j: tx,
        });
    }
    Ok(summaries)
}

pub fn summaries_from_schedule(
    tasks: &[TaskSpec],
    params: &SystemParams,
    schedule: &Schedule,
) -> Result<Vec<MobileSummary>> {
    let mut summaries = Vec::with_capacity(tasks.len());
    for (k, task) in tasks.iter().enumerate() {
        let mut offloaded = 0.0;
        let mut tx = 0.0;
        for iv in &schedule.intervals[k] {
            offloaded += iv.bits;
            tx += offload_energy(task, params, iv.bits, iv.len())?;
        }
        summaries.push(MobileSummary {
            id: task.id,
            offloaded_bits: offloaded,
            local_energy_j: local_energy(task, params, offloaded)?,
            offload_energy_j: tx,
        });
    }
    Ok(summaries)
}

/// Flatten an allocation; map order keeps the listing deterministic.
pub fn allocation_entries(alloc: &Allocation) -> Vec<AllocationEntry> {
    alloc
        .durations
        .iter()
        .map(|(&(k, n), &dur)| AllocationEntry {
            mobile: k,
            epoch: n,
            bits: alloc.bits.get(&(k, n)).copied().unwrap_or(0.0),
            duration_s: dur,
        })
        .collect()
}

/// Flatten a schedule into global time order.
pub fn schedule_entries(schedule: &Schedule) -> Vec<ScheduleEntry> {
    let mut entries: Vec<ScheduleEntry> = schedule
        .intervals
        .iter()
        .enumerate()
        .flat_map(|(k, ivs)| {
            ivs.iter().map(move |iv| ScheduleEntry {
                mobile: k,
                start_s: iv.start,
                end_s: iv.end,
                bits: iv.bits,
            })
        })
        .collect();
    entries.sort_by(|a, b| {
        a.start_s
            .partial_cmp(&b.start_s)
            .unwrap()
            .then(a.mobile.cmp(&b.mobile))
    });
    entries
}

/// Constraint residuals of a raw allocation: max relative time-sharing
/// overuse across epochs and max relative offload-bound violation across
/// mobiles. Mirrors the solver-report semantics for solvers that return only
/// an allocation.
pub fn allocation_residuals(
    tasks: &[TaskSpec],
    timeline: &Timeline,
    alloc: &Allocation,
) -> (f64, f64) {
    let mut time_sharing = 0.0_f64;
    for n in 0..timeline.epoch_lengths.len() {
        let len = timeline.epoch_lengths[n];
        let used = alloc.epoch_time_used(n);
        time_sharing = time_sharing.max((used - len).max(0.0) / len.max(f64::MIN_POSITIVE));
    }
    let mut data_bounds = 0.0_f64;
    for (k, task) in tasks.iter().enumerate() {
        let (r_min, r_max) = offload_bounds(task);
        let total = alloc.total_bits(k);
        let violation = (r_min - total).max(total - r_max).max(0.0);
        data_bounds = data_bounds.max(violation / task.data_bits.max(1.0));
    }
    (time_sharing, data_bounds)
}
