//! Shared instance construction for the solver benchmarks.

use meco_core::harness::{generate_scenario, sub_seed, OrderRegime, ScenarioConfig};
use meco_core::timeline::validate_tasks;
use meco_core::{EnergyModel, SystemParams, TaskSpec};

/// First feasible default-scale general-order draw with the given size.
pub fn general_instance(master: u64, mobiles: usize) -> (Vec<TaskSpec>, SystemParams) {
    let mut idx = 0_u64;
    loop {
        idx += 1;
        let cfg = ScenarioConfig {
            mobiles,
            model: EnergyModel::Monomial,
            seed: sub_seed(master, idx),
            ..Default::default()
        };
        let (tasks, params) = generate_scenario(&cfg);
        match validate_tasks(&tasks, &params) {
            Ok(rep) if rep.all_feasible() => return (tasks, params),
            _ => continue,
        }
    }
}

/// Identical-order draw with lifted caps so the structured solver applies.
pub fn identical_instance(master: u64, mobiles: usize) -> (Vec<TaskSpec>, SystemParams) {
    let cfg = ScenarioConfig {
        mobiles,
        regime: OrderRegime::Identical,
        seed: sub_seed(master, 1),
        ..Default::default()
    };
    let (mut tasks, params) = generate_scenario(&cfg);
    for t in &mut tasks {
        t.max_cpu_freq = 1e13;
        t.vm_cap_cycles = 1e18;
    }
    (tasks, params)
}
