//! Experiment harness: random scenario generation for the three order
//! regimes, the four baseline policies, and seeded Monte Carlo sweeps with
//! CSV emission. A master seed fully determines every realization; sweep
//! points and regimes share per-realization sub-seeds so comparisons use
//! common random numbers.

use std::io::Write;
use std::time::Instant;

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bcd::{run_bcd, BcdOptions, BcdRounds};
use crate::energy::{Allocation, EnergyModel, SystemParams};
use crate::error::Result;
use crate::timeline::{build_timeline, TaskSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderRegime {
    General,
    Identical,
    Reverse,
}

/// Scenario generator configuration. Defaults follow the evaluation setup:
/// 30 mobiles, arrivals uniform on [0, 3] s, exponential latency with mean
/// 0.6 s, data uniform on [0, 60] KB at 10^3 bits per KB, C uniform on
/// [500, 1500] cycles/bit, CPU frequency from {0.1..1.0} GHz, VM cap uniform
/// on [0, 4e9] cycles, Rayleigh-power channel gains with mean 1e-3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mobiles: usize,
    pub arrival_window_s: f64,
    pub expected_latency_s: f64,
    /// Data size range in KB; see `kb_bits` for the KB convention.
    pub data_kb_range: (f64, f64),
    /// Bits per KB. 1e3 by default; set 8e3 for the 8-bit-byte convention.
    pub kb_bits: f64,
    pub cycles_per_bit_range: (f64, f64),
    pub cpu_freq_choices_hz: Vec<f64>,
    pub vm_cap_range_cycles: (f64, f64),
    pub gamma_switch: f64,
    pub lambda_coeff: f64,
    pub monomial_order: f64,
    pub avg_channel_gain: f64,
    pub bandwidth_hz: f64,
    pub noise_power: f64,
    pub model: EnergyModel,
    pub regime: OrderRegime,
    /// Horizon of the order-statistics construction (identical/reverse).
    pub total_duration_s: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            mobiles: 30,
            arrival_window_s: 3.0,
            expected_latency_s: 0.6,
            data_kb_range: (0.0, 60.0),
            kb_bits: 1e3,
            cycles_per_bit_range: (500.0, 1500.0),
            cpu_freq_choices_hz: (1..=10).map(|i| i as f64 * 1e8).collect(),
            vm_cap_range_cycles: (0.0, 4e9),
            gamma_switch: 1e-28,
            lambda_coeff: 1e-25,
            monomial_order: 3.0,
            avg_channel_gain: 1e-3,
            bandwidth_hz: 1e6,
            noise_power: 1e-9,
            model: EnergyModel::Monomial,
            regime: OrderRegime::General,
            total_duration_s: 3.6,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            lambda_coeff: self.lambda_coeff,
            gamma_switch: self.gamma_switch,
            monomial_order: self.monomial_order,
            bandwidth_hz: self.bandwidth_hz,
            noise_power: self.noise_power,
            model: self.model,
        }
    }
}

/// SplitMix64: derive a per-realization sub-seed from the master seed.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15_u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn sample_exponential(rng: &mut impl Rng, mean: f64) -> f64 {
    let u: f64 = rng.gen_range(0.0_f64..1.0);
    -mean * (1.0 - u).ln()
}

/// Draw one random instance. Per-mobile attributes are sampled before the
/// regime-specific window construction, so regimes with equal seeds share
/// identical loads, CPU draws, and channel gains.
pub fn generate_scenario(cfg: &ScenarioConfig) -> (Vec<TaskSpec>, SystemParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.mobiles;

    let data = Uniform::new_inclusive(
        cfg.data_kb_range.0 * cfg.kb_bits,
        cfg.data_kb_range.1 * cfg.kb_bits,
    );
    let cycles = Uniform::new_inclusive(cfg.cycles_per_bit_range.0, cfg.cycles_per_bit_range.1);
    let vm = Uniform::new_inclusive(cfg.vm_cap_range_cycles.0, cfg.vm_cap_range_cycles.1);

    struct Attrs {
        data_bits: f64,
        cycles_per_bit: f64,
        max_cpu_freq: f64,
        vm_cap_cycles: f64,
        channel_gain: f64,
    }
    let attrs: Vec<Attrs> = (0..k)
        .map(|_| Attrs {
            data_bits: data.sample(&mut rng),
            cycles_per_bit: cycles.sample(&mut rng),
            max_cpu_freq: cfg.cpu_freq_choices_hz
                [rng.gen_range(0..cfg.cpu_freq_choices_hz.len())],
            vm_cap_cycles: vm.sample(&mut rng),
            // Rayleigh-fading power gain: exponential with the given mean.
            channel_gain: sample_exponential(&mut rng, cfg.avg_channel_gain),
        })
        .collect();

    let windows: Vec<(f64, f64)> = match cfg.regime {
        OrderRegime::General => (0..k)
            .map(|_| {
                let arrival = rng.gen_range(0.0..cfg.arrival_window_s);
                let latency = sample_exponential(&mut rng, cfg.expected_latency_s).max(1e-6);
                (arrival, arrival + latency)
            })
            .collect(),
        OrderRegime::Identical | OrderRegime::Reverse => {
            // 2K instants: s_0 = 0, s_{2K-1} = T, interior order statistics.
            let t = cfg.total_duration_s;
            let mut s: Vec<f64> = (0..2 * k - 2).map(|_| rng.gen_range(0.0..t)).collect();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            s.insert(0, 0.0);
            s.push(t);
            (0..k)
                .map(|i| {
                    let arrival = s[i];
                    let deadline = match cfg.regime {
                        OrderRegime::Identical => s[k + i],
                        OrderRegime::Reverse => s[2 * k - 1 - i],
                        OrderRegime::General => unreachable!(),
                    };
                    (arrival, deadline)
                })
                .collect()
        }
    };

    let tasks = attrs
        .into_iter()
        .zip(windows)
        .enumerate()
        .map(|(id, (a, (arrival, deadline)))| TaskSpec {
            id,
            arrival,
            deadline,
            data_bits: a.data_bits,
            cycles_per_bit: a.cycles_per_bit,
            max_cpu_freq: a.max_cpu_freq,
            vm_cap_cycles: a.vm_cap_cycles,
            channel_gain: a.channel_gain,
        })
        .collect();
    (tasks, cfg.system_params())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselinePolicy {
    /// Equal per-epoch shares plus one exact partition pass.
    EqualTimeDivision,
    /// One full descent iteration from the equal initialization.
    OneRound,
    TwoRound,
    /// Descent to convergence.
    Optimal,
}

impl BaselinePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            BaselinePolicy::EqualTimeDivision => "EqualTimeDivision",
            BaselinePolicy::OneRound => "OneRound",
            BaselinePolicy::TwoRound => "TwoRound",
            BaselinePolicy::Optimal => "Optimal",
        }
    }

    pub const ALL: [BaselinePolicy; 4] = [
        BaselinePolicy::EqualTimeDivision,
        BaselinePolicy::OneRound,
        BaselinePolicy::TwoRound,
        BaselinePolicy::Optimal,
    ];
}

/// Solve one instance under a baseline policy.
pub fn run_baseline(
    policy: BaselinePolicy,
    tasks: &[TaskSpec],
    params: &SystemParams,
) -> Result<(Allocation, f64)> {
    let timeline = build_timeline(tasks)?;
    let opts = BcdOptions::default();
    let rounds = match policy {
        BaselinePolicy::EqualTimeDivision => BcdRounds::PartitionOnly,
        BaselinePolicy::OneRound => BcdRounds::Fixed(1),
        BaselinePolicy::TwoRound => BcdRounds::Fixed(2),
        BaselinePolicy::Optimal => BcdRounds::Converge,
    };
    let (alloc, report) = run_bcd(tasks, params, &timeline, &opts, rounds)?;
    Ok((alloc, report.objective_joules))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    MonomialOrder,
    ExpectedLatency,
    /// Expected data size in KB; the uniform range becomes [0, 2*value].
    ExpectedDataSize,
    TotalDuration,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::MonomialOrder => "monomial_order",
            SweepAxis::ExpectedLatency => "expected_latency",
            SweepAxis::ExpectedDataSize => "expected_data_size",
            SweepAxis::TotalDuration => "total_duration",
        }
    }

    fn apply(&self, cfg: &mut ScenarioConfig, value: f64) {
        match self {
            SweepAxis::MonomialOrder => cfg.monomial_order = value,
            SweepAxis::ExpectedLatency => cfg.expected_latency_s = value,
            SweepAxis::ExpectedDataSize => cfg.data_kb_range = (0.0, 2.0 * value),
            SweepAxis::TotalDuration => cfg.total_duration_s = value,
        }
    }
}

/// One aggregated sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub sweep_var: &'static str,
    pub value: f64,
    pub policy: &'static str,
    pub mean_energy_j: f64,
    pub stderr_energy_j: f64,
    pub mean_time_s: f64,
    pub realizations: usize,
    pub failures: usize,
}

/// Sweep request: a base config, an axis with values, policies, and the
/// realization count per sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: ScenarioConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default = "default_policies")]
    pub policies: Vec<BaselinePolicy>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
}

fn default_policies() -> Vec<BaselinePolicy> {
    BaselinePolicy::ALL.to_vec()
}

fn default_realizations() -> usize {
    1000
}

/// Run a full sweep. Realizations run in parallel; aggregation walks them in
/// index order, so results are deterministic given the master seed (timings
/// excepted).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ExperimentRow>> {
    if spec.values.is_empty() {
        return Err(crate::error::Error::InvalidParams(
            "empty sweep values".into(),
        ));
    }
    let mut rows = Vec::new();
    for &value in &spec.values {
        let mut cfg = spec.base.clone();
        spec.axis.apply(&mut cfg, value);
        for &policy in &spec.policies {
            // energy and wall time per realization; None marks a failure.
            let results: Vec<Option<(f64, f64)>> = (0..spec.realizations as u64)
                .into_par_iter()
                .map(|i| {
                    let mut c = cfg.clone();
                    // Sub-seed depends only on (master seed, index): common
                    // random numbers across sweep values and regimes.
                    c.seed = sub_seed(spec.base.seed, i);
                    let (tasks, params) = generate_scenario(&c);
                    let start = Instant::now();
                    match run_baseline(policy, &tasks, &params) {
                        Ok((_, energy)) => Some((energy, start.elapsed().as_secs_f64())),
                        Err(_) => None,
                    }
                })
                .collect();

            let ok: Vec<(f64, f64)> = results.iter().flatten().copied().collect();
            let failures = spec.realizations - ok.len();
            let n = ok.len().max(1) as f64;
            let mean_e = ok.iter().map(|r| r.0).sum::<f64>() / n;
            let var = ok
                .iter()
                .map(|r| (r.0 - mean_e) * (r.0 - mean_e))
                .sum::<f64>()
                / (n - 1.0).max(1.0);
            let mean_t = ok.iter().map(|r| r.1).sum::<f64>() / n;
            rows.push(ExperimentRow {
                sweep_var: spec.axis.name(),
                value,
                policy: policy.name(),
                mean_energy_j: mean_e,
                stderr_energy_j: (var / n).sqrt(),
                mean_time_s: mean_t,
                realizations: ok.len(),
                failures,
            });
        }
    }
    Ok(rows)
}

/// Emit the sweep CSV with the documented header.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "sweep_var",
        "value",
        "policy",
        "mean_energy_j",
        "stderr_energy_j",
        "mean_time_s",
        "realizations",
        "failures",
    ])
    .map_err(|e| crate::error::Error::InvalidParams(format!("csv write failed: {e}")))?;
    for r in rows {
        w.write_record([
            r.sweep_var.to_string(),
            format!("{}", r.value),
            r.policy.to_string(),
            format!("{:.6e}", r.mean_energy_j),
            format!("{:.6e}", r.stderr_energy_j),
            format!("{:.6e}", r.mean_time_s),
            format!("{}", r.realizations),
            format!("{}", r.failures),
        ])
        .map_err(|e| crate::error::Error::InvalidParams(format!("csv write failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| crate::error::Error::InvalidParams(format!("csv flush failed: {e}")))?;
    Ok(())
}
