//! Energy models and the total-energy objective.
//!
//! Local computing costs `gamma * C^3 * (L - offloaded)^3 / T^2`. Offloading
//! costs either the monomial model `lambda * bits^m / (g * t^{m-1})` or the
//! Shannon-based exponential model `(t / g) * N0 * (2^{bits/(B t)} - 1)`.
//! The extreme constant magnitudes are folded once into the per-mobile
//! aggregate coefficients `a_k = lambda / g_k` and `b_k = gamma * C_k^3`,
//! which sit in well-conditioned ranges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeline::{offload_bounds, TaskSpec, Timeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyModel {
    Monomial,
    Exponential,
}

/// System-wide constants, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Offloading energy coefficient `lambda`, J * (s/bit)^m scaled by gain.
    pub lambda_coeff: f64,
    /// CPU switched-capacitance constant `gamma`, J * s^2 / cycles^3.
    pub gamma_switch: f64,
    /// Monomial order `m > 1`.
    pub monomial_order: f64,
    /// Channel bandwidth `B`, Hz (exponential model).
    pub bandwidth_hz: f64,
    /// Receiver noise power `N_0`, W (exponential model).
    pub noise_power: f64,
    pub model: EnergyModel,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_coeff > 0.0) {
            return Err(Error::InvalidParams("lambda_coeff must be positive".into()));
        }
        if !(self.gamma_switch > 0.0) {
            return Err(Error::InvalidParams("gamma_switch must be positive".into()));
        }
        if !(self.monomial_order > 1.0) {
            return Err(Error::InvalidParams("monomial_order must exceed 1".into()));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidParams("bandwidth_hz must be positive".into()));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::InvalidParams("noise_power must be positive".into()));
        }
        Ok(())
    }
}

/// Per-mobile aggregate coefficients and offload bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobileCoeffs {
    /// `a_k = lambda / g_k`.
    pub a: f64,
    /// `b_k = gamma * C_k^3`.
    pub b: f64,
    pub r_min_bits: f64,
    pub r_max_bits: f64,
}

/// Sparse per-(mobile, epoch) offloaded bits and durations.
///
/// Entries exist only for epochs in the mobile's epoch-set. `BTreeMap` keeps
/// iteration order deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Allocation {
    pub bits: BTreeMap<(usize, usize), f64>,
    pub durations: BTreeMap<(usize, usize), f64>,
}

impl Allocation {
    pub fn total_bits(&self, mobile: usize) -> f64 {
        self.bits
            .range((mobile, 0)..(mobile + 1, 0))
            .map(|(_, &v)| v)
            .sum()
    }

    pub fn epoch_time_used(&self, epoch: usize) -> f64 {
        self.durations
            .iter()
            .filter(|((_, n), _)| *n == epoch)
            .map(|(_, &v)| v)
            .sum()
    }
}

/// Local-computing energy when `offloaded_total` bits are shipped away.
pub fn local_energy(task: &TaskSpec, params: &SystemParams, offloaded_total: f64) -> Result<f64> {
    if offloaded_total > task.data_bits {
        return Err(Error::OffloadExceedsData {
            offloaded: offloaded_total,
            data_bits: task.data_bits,
        });
    }
    let residual = task.data_bits - offloaded_total;
    let t = task.latency();
    Ok(params.gamma_switch * task.cycles_per_bit.powi(3) * residual.powi(3) / (t * t))
}

/// Transmission energy for `bits` sent over `duration` seconds.
///
/// Positive bits with zero duration is a hard error rather than +inf, so an
/// allocation bug upstream surfaces immediately.
pub fn offload_energy(
    task: &TaskSpec,
    params: &SystemParams,
    bits: f64,
    duration: f64,
) -> Result<f64> {
    if bits <= 0.0 {
        return Ok(0.0);
    }
    if duration <= 0.0 {
        return Err(Error::BitsWithoutTime {
            id: task.id,
            epoch: usize::MAX,
            bits,
        });
    }
    let g = task.channel_gain;
    Ok(match params.model {
        EnergyModel::Monomial => {
            let m = params.monomial_order;
            params.lambda_coeff * bits.powf(m) / (g * duration.powf(m - 1.0))
        }
        EnergyModel::Exponential => {
            let rate = bits / duration;
            duration / g * params.noise_power * ((rate / params.bandwidth_hz).exp2() - 1.0)
        }
    })
}

/// Aggregate coefficients for one feasible task.
pub fn mobile_coeffs(task: &TaskSpec, params: &SystemParams) -> Result<MobileCoeffs> {
    let (r_min, r_max) = offload_bounds(task);
    if r_min > r_max {
        return Err(Error::InfeasibleInstance {
            id: task.id,
            r_min,
            r_max,
        });
    }
    Ok(MobileCoeffs {
        a: params.lambda_coeff / task.channel_gain,
        b: params.gamma_switch * task.cycles_per_bit.powi(3),
        r_min_bits: r_min,
        r_max_bits: r_max,
    })
}

/// Total mobile-energy objective over a full allocation.
pub fn objective(
    tasks: &[TaskSpec],
    params: &SystemParams,
    timeline: &Timeline,
    alloc: &Allocation,
) -> Result<f64> {
    let mut total = 0.0;
    for (k, task) in tasks.iter().enumerate() {
        let mut offloaded = 0.0;
        for &n in &timeline.epoch_sets[k] {
            let bits = alloc.bits.get(&(k, n)).copied().unwrap_or(0.0);
            let dur = alloc.durations.get(&(k, n)).copied().unwrap_or(0.0);
            if bits > 0.0 && dur <= 0.0 {
                return Err(Error::BitsWithoutTime { id: task.id, epoch: n, bits });
            }
            total += offload_energy(task, params, bits, dur)?;
            offloaded += bits;
        }
        total += local_energy(task, params, offloaded)?;
    }
    Ok(total)
}
