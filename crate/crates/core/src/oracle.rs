//! Independent correctness oracle: projected gradient on the full joint
//! (bits, durations) problem with exact decomposed projections, plus a grid
//! brute force for tiny instances. Shares only the energy evaluator with the
//! structured solvers; disagreement with them is a test failure.

use crate::energy::{
    local_energy, mobile_coeffs, offload_energy, Allocation, EnergyModel, SystemParams,
};
use crate::error::{Error, Result};
use crate::timeline::{TaskSpec, Timeline};

#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_iters: usize,
    /// Initial duration floor, relative to each epoch length. A generous
    /// first floor keeps the t^{-(m-1)} wall shallow enough for line
    /// searches to make progress; restarts then relax it toward zero.
    pub floor_rel: f64,
    /// Relative objective-decrease tolerance per sweep.
    pub tol: f64,
    /// Floor-relaxation restarts (each divides the floor by 100).
    pub restarts: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            armijo: 1e-4,
            max_iters: 50_000,
            floor_rel: 1e-2,
            tol: 1e-12,
            restarts: 4,
        }
    }
}

/// Shift a vector by a common threshold so that `sum(max(v - mu, 0))`
/// equals `target`, the core of both simplex-style projections.
fn shift_to_sum(v: &[f64], target: f64) -> Vec<f64> {
    debug_assert!(target >= 0.0);
    if target == 0.0 {
        return vec![0.0; v.len()];
    }
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut mu = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - target) / (j + 1) as f64;
        let next = sorted.get(j + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if u - candidate > 0.0 && next - candidate <= 0.0 {
            mu = candidate;
            break;
        }
    }
    v.iter().map(|&x| (x - mu).max(0.0)).collect()
}

/// Euclidean projection onto `{x >= 0, sum(x) <= cap}`.
pub fn project_epoch_simplex(values: &[f64], cap: f64) -> Vec<f64> {
    let clipped: Vec<f64> = values.iter().map(|&x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= cap {
        return clipped;
    }
    shift_to_sum(values, cap)
}

/// Euclidean projection onto `{x >= 0, lo <= sum(x) <= hi}`.
pub fn project_capped_sum_box(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    debug_assert!(0.0 <= lo && lo <= hi);
    let clipped: Vec<f64> = values.iter().map(|&x| x.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if sum > hi {
        shift_to_sum(values, hi)
    } else if sum < lo {
        shift_to_sum(values, lo)
    } else {
        clipped
    }
}

struct OracleProblem<'a> {
    tasks: &'a [TaskSpec],
    params: &'a SystemParams,
    timeline: &'a Timeline,
    /// Flat variable list: one (mobile, epoch) pair per membership.
    vars: Vec<(usize, usize)>,
    /// Variable indices grouped per mobile and per epoch.
    by_mobile: Vec<Vec<usize>>,
    by_epoch: Vec<Vec<usize>>,
    bounds: Vec<(f64, f64)>,
}

impl OracleProblem<'_> {
    fn energy(&self, bits: &[f64], durs: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (k, task) in self.tasks.iter().enumerate() {
            let mut offloaded = 0.0;
            for &i in &self.by_mobile[k] {
                total += offload_energy(task, self.params, bits[i], durs[i])?;
                offloaded += bits[i];
            }
            total += local_energy(task, self.params, offloaded.min(task.data_bits))?;
        }
        Ok(total)
    }

    /// Analytic gradient; requires strictly positive durations wherever the
    /// paired bits are positive.
    fn gradient(&self, bits: &[f64], durs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let p = self.params;
        let mut g_bits = vec![0.0; bits.len()];
        let mut g_durs = vec![0.0; durs.len()];
        for (k, task) in self.tasks.iter().enumerate() {
            let offloaded: f64 = self.by_mobile[k].iter().map(|&i| bits[i]).sum();
            let residual = (task.data_bits - offloaded).max(0.0);
            let t_lat = task.latency();
            let d_local =
                -3.0 * p.gamma_switch * task.cycles_per_bit.powi(3) * residual * residual
                    / (t_lat * t_lat);
            let g = task.channel_gain;
            for &i in &self.by_mobile[k] {
                let rate = if durs[i] > 0.0 { bits[i] / durs[i] } else { 0.0 };
                let (d_l, d_t) = match p.model {
                    EnergyModel::Monomial => {
                        let m = p.monomial_order;
                        (
                            m * p.lambda_coeff / g * rate.powf(m - 1.0),
                            -(m - 1.0) * p.lambda_coeff / g * rate.powf(m),
                        )
                    }
                    EnergyModel::Exponential => {
                        let z = (rate / p.bandwidth_hz).exp2();
                        let psi = p.noise_power * (z - 1.0);
                        let dpsi =
                            p.noise_power * std::f64::consts::LN_2 / p.bandwidth_hz * z;
                        ((dpsi) / g, (psi - rate * dpsi) / g)
                    }
                };
                g_bits[i] = d_local + d_l;
                g_durs[i] = d_t;
            }
        }
        (g_bits, g_durs)
    }

    fn project(&self, bits: &mut [f64], durs: &mut [f64], floor_rel: f64) {
        for (k, idx) in self.by_mobile.iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let v: Vec<f64> = idx.iter().map(|&i| bits[i]).collect();
            let (lo, hi) = self.bounds[k];
            let proj = project_capped_sum_box(&v, lo, hi);
            // Hard-zero negligible loads: a stray sub-microbit share on a
            // floor-thin duration carries huge curvature that poisons the
            // Barzilai-Borwein step while contributing no energy.
            let eps = 1e-9 * self.tasks[k].data_bits;
            for (&i, &x) in idx.iter().zip(&proj) {
                bits[i] = if x <= eps { 0.0 } else { x };
            }
        }
        for (n, idx) in self.by_epoch.iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let tau = self.timeline.epoch_lengths[n];
            let floor = floor_rel * tau;
            let cap = (tau - floor * idx.len() as f64).max(0.0);
            let v: Vec<f64> = idx.iter().map(|&i| durs[i] - floor).collect();
            let proj = project_epoch_simplex(&v, cap);
            for (&i, &x) in idx.iter().zip(&proj) {
                durs[i] = x + floor;
            }
        }
    }
}

fn build_problem<'a>(
    tasks: &'a [TaskSpec],
    params: &'a SystemParams,
    timeline: &'a Timeline,
) -> Result<OracleProblem<'a>> {
    params.validate()?;
    let k = tasks.len();
    let n = timeline.num_epochs();
    if k * n > 10_000 {
        return Err(Error::InstanceTooLarge(format!(
            "oracle guard: K*N = {} exceeds 10000",
            k * n
        )));
    }
    let mut vars = Vec::new();
    let mut by_mobile = vec![Vec::new(); k];
    let mut by_epoch = vec![Vec::new(); n];
    for (ki, set) in timeline.epoch_sets.iter().enumerate() {
        for &ni in set {
            if timeline.epoch_lengths[ni] > 0.0 {
                by_mobile[ki].push(vars.len());
                by_epoch[ni].push(vars.len());
                vars.push((ki, ni));
            }
        }
    }
    let mut bounds = Vec::with_capacity(k);
    for (ki, task) in tasks.iter().enumerate() {
        task.validate()?;
        let c = mobile_coeffs(task, params)?;
        if c.r_min_bits > 0.0 && by_mobile[ki].is_empty() {
            return Err(Error::NoAirtime {
                id: task.id,
                r_min: c.r_min_bits,
            });
        }
        bounds.push((c.r_min_bits, c.r_max_bits));
    }
    Ok(OracleProblem {
        tasks,
        params,
        timeline,
        vars,
        by_mobile,
        by_epoch,
        bounds,
    })
}

/// Projected-gradient solve of the full joint problem.
pub fn oracle_solve(
    tasks: &[TaskSpec],
    params: &SystemParams,
    timeline: &Timeline,
    opts: &OracleOptions,
) -> Result<(Allocation, f64)> {
    let problem = build_problem(tasks, params, timeline)?;
    let nv = problem.vars.len();

    // Dimensionless working scales, per variable. Bits are normalized by the
    // owning mobile's data size and durations by the owning epoch's length;
    // the scale is uniform inside each constraint block, so Euclidean
    // projections in original coordinates remain exact, while the
    // conditioning across blocks (tiny vs. long epochs) is equalized.
    let l_scale = tasks
        .iter()
        .map(|t| t.data_bits)
        .fold(0.0_f64, f64::max)
        .max(1.0);
    let lsc: Vec<f64> = problem
        .vars
        .iter()
        .map(|&(k, _)| tasks[k].data_bits.max(1.0))
        .collect();
    let tsc: Vec<f64> = problem
        .vars
        .iter()
        .map(|&(_, n)| timeline.epoch_lengths[n].max(1e-30))
        .collect();

    // Equal-share durations, half-data bit loads clamped into bounds.
    let mut durs = vec![0.0; nv];
    let mut bits = vec![0.0; nv];
    for (i, &(k, n)) in problem.vars.iter().enumerate() {
        durs[i] = timeline.epoch_lengths[n] / problem.timeline.user_sets[n].len() as f64;
        let share = problem.by_mobile[k].len() as f64;
        let (lo, hi) = problem.bounds[k];
        bits[i] = (tasks[k].data_bits / 2.0).clamp(lo, hi) / share;
    }

    let e_scale = {
        let all_local: f64 = tasks
            .iter()
            .map(|t| local_energy(t, params, 0.0).unwrap())
            .sum();
        if all_local > 0.0 {
            all_local
        } else {
            return Ok((to_allocation(&problem, &bits, &durs), 0.0));
        }
    };

    let mut trace = Vec::new();
    for restart in 0..=opts.restarts {
        let floor_rel = opts.floor_rel * 0.01_f64.powi(restart as i32);
        problem.project(&mut bits, &mut durs, floor_rel);
        let mut energy = problem.energy(&bits, &durs)? / e_scale;
        let mut step = 1e-2;
        let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> = None;
        let mut stall = 0;
        let mut line_failures = 0;
        for _ in 0..opts.max_iters {
            let (gb_raw, gt_raw) = problem.gradient(&bits, &durs);
            // Scaled gradient in scaled coordinates.
            let gb: Vec<f64> =
                (0..nv).map(|i| gb_raw[i] * lsc[i] / e_scale).collect();
            let gt: Vec<f64> =
                (0..nv).map(|i| gt_raw[i] * tsc[i] / e_scale).collect();

            if let Some((pb, pd, pgb, pgt)) = &prev {
                let mut sy = 0.0;
                let mut yy = 0.0;
                for i in 0..nv {
                    // Floor-pinned durations sit against the t -> 0 wall where
                    // the curvature is enormous; leave them out of the step
                    // estimate or every other coordinate crawls.
                    let (_, n) = problem.vars[i];
                    let floor = floor_rel * timeline.epoch_lengths[n];
                    if durs[i] <= floor * 1.5 {
                        continue;
                    }
                    let dsb = (bits[i] - pb[i]) / lsc[i];
                    let dst = (durs[i] - pd[i]) / tsc[i];
                    let dgb = gb[i] - pgb[i];
                    let dgt = gt[i] - pgt[i];
                    sy += dsb * dgb + dst * dgt;
                    yy += dgb * dgb + dgt * dgt;
                }
                if sy > 0.0 && yy > 0.0 {
                    step = (sy / yy).clamp(1e-14, 1e8);
                }
            }

            let mut accepted = false;
            let mut trial_step = step;
            for _ in 0..80 {
                let mut tb: Vec<f64> = (0..nv)
                    .map(|i| bits[i] - trial_step * lsc[i] * gb[i])
                    .collect();
                let mut td: Vec<f64> = (0..nv)
                    .map(|i| durs[i] - trial_step * tsc[i] * gt[i])
                    .collect();
                problem.project(&mut tb, &mut td, floor_rel);
                let te = problem.energy(&tb, &td)? / e_scale;
                let descent: f64 = (0..nv)
                    .map(|i| {
                        gb[i] * (bits[i] - tb[i]) / lsc[i] + gt[i] * (durs[i] - td[i]) / tsc[i]
                    })
                    .sum();
                if te <= energy - opts.armijo * descent.max(0.0) + 1e-18 {
                    prev = Some((bits.clone(), durs.clone(), gb.clone(), gt.clone()));
                    let moved: f64 = (0..nv)
                        .map(|i| {
                            ((bits[i] - tb[i]) / lsc[i]).abs()
                                + ((durs[i] - td[i]) / tsc[i]).abs()
                        })
                        .sum();
                    bits = tb;
                    durs = td;
                    let decrease = energy - te;
                    energy = te;
                    accepted = true;
                    line_failures = 0;
                    step = trial_step;
                    if decrease < opts.tol * energy.max(1e-300) && moved < 1e-10 {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    break;
                }
                trial_step *= 0.5;
            }
            if !accepted {
                // Curvature estimate poisoned (e.g. by the floor
                // singularity): forget it and retry from a fresh step.
                prev = None;
                step = 1e-8;
                line_failures += 1;
                if line_failures >= 8 {
                    break;
                }
                continue;
            }
            if stall >= 30 {
                break;
            }
        }
        trace.push(energy * e_scale);
    }

    // Clean up numerically-zero loads.
    for b in bits.iter_mut() {
        if *b <= 1e-12 * l_scale {
            *b = 0.0;
        }
    }
    let alloc = to_allocation(&problem, &bits, &durs);
    let objective = problem.energy(&bits, &durs)?;
    Ok((alloc, objective))
}

fn to_allocation(problem: &OracleProblem, bits: &[f64], durs: &[f64]) -> Allocation {
    let mut alloc = Allocation::default();
    for (k, set) in problem.timeline.epoch_sets.iter().enumerate() {
        for &n in set {
            alloc.bits.insert((k, n), 0.0);
            alloc.durations.insert((k, n), 0.0);
        }
    }
    for (i, &(k, n)) in problem.vars.iter().enumerate() {
        alloc.bits.insert((k, n), bits[i]);
        alloc.durations.insert((k, n), durs[i]);
    }
    alloc
}

/// Analytic gradient of the objective at a feasible allocation, keyed like
/// the allocation itself. Exposed for finite-difference validation.
pub fn objective_gradient(
    tasks: &[TaskSpec],
    params: &SystemParams,
    timeline: &Timeline,
    alloc: &Allocation,
) -> Result<(
    std::collections::BTreeMap<(usize, usize), f64>,
    std::collections::BTreeMap<(usize, usize), f64>,
)> {
    let problem = build_problem(tasks, params, timeline)?;
    let nv = problem.vars.len();
    let mut bits = vec![0.0; nv];
    let mut durs = vec![0.0; nv];
    for (i, &(k, n)) in problem.vars.iter().enumerate() {
        bits[i] = alloc.bits.get(&(k, n)).copied().unwrap_or(0.0);
        durs[i] = alloc.durations.get(&(k, n)).copied().unwrap_or(0.0);
    }
    let (gb, gt) = problem.gradient(&bits, &durs);
    let mut g_bits = std::collections::BTreeMap::new();
    let mut g_durs = std::collections::BTreeMap::new();
    for (i, &key) in problem.vars.iter().enumerate() {
        g_bits.insert(key, gb[i]);
        g_durs.insert(key, gt[i]);
    }
    Ok((g_bits, g_durs))
}

/// Exhaustive grid minimum for instances with at most 4 variables total
/// (2 per (mobile, epoch) membership).
pub fn brute_force_small(
    tasks: &[TaskSpec],
    params: &SystemParams,
    timeline: &Timeline,
    grid_points_per_axis: usize,
) -> Result<f64> {
    let problem = build_problem(tasks, params, timeline)?;
    let nv = problem.vars.len();
    if 2 * nv > 4 {
        return Err(Error::InstanceTooLarge(format!(
            "brute force limited to 4 variables, instance has {}",
            2 * nv
        )));
    }
    let g = grid_points_per_axis.max(2);
    let axis = |max: f64| (0..g).map(move |i| max * i as f64 / (g - 1) as f64);

    let mut best = f64::INFINITY;
    let mut bits = vec![0.0; nv];
    let mut durs = vec![0.0; nv];
    let mut stack: Vec<usize> = vec![0; nv * 2];
    // Odometer enumeration over all axes.
    'outer: loop {
        for (i, &(k, n)) in problem.vars.iter().enumerate() {
            let hi_b = problem.bounds[k].1;
            let tau = timeline.epoch_lengths[n];
            bits[i] = axis(hi_b).nth(stack[2 * i]).unwrap();
            durs[i] = axis(tau).nth(stack[2 * i + 1]).unwrap();
        }
        // Feasibility filter.
        let mut feasible = true;
        for (k, idx) in problem.by_mobile.iter().enumerate() {
            let s: f64 = idx.iter().map(|&i| bits[i]).sum();
            let (lo, hi) = problem.bounds[k];
            if s < lo || s > hi {
                feasible = false;
            }
        }
        for (n, idx) in problem.by_epoch.iter().enumerate() {
            let s: f64 = idx.iter().map(|&i| durs[i]).sum();
            if s > timeline.epoch_lengths[n] * (1.0 + 1e-12) {
                feasible = false;
            }
        }
        if feasible {
            if let Ok(e) = problem.energy(&bits, &durs) {
                best = best.min(e);
            }
        }
        // Advance the odometer.
        for d in 0..stack.len() {
            stack[d] += 1;
            if stack[d] < g {
                continue 'outer;
            }
            stack[d] = 0;
        }
        break;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergyModel;
    use crate::timeline::build_timeline;
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

    fn mk(id: usize, arrival: f64, deadline: f64, bits: f64, gain: f64) -> TaskSpec {
        TaskSpec {
            id,
            arrival,
            deadline,
            data_bits: bits,
            cycles_per_bit: 1000.0,
            max_cpu_freq: 1e12,
            vm_cap_cycles: 1e15,
            channel_gain: gain,
        }
    }

    #[test]
    fn simplex_projection_cases() {
        assert_eq!(project_epoch_simplex(&[0.5, 0.5], 2.0), vec![0.5, 0.5]);
        let p = project_epoch_simplex(&[3.0, 1.0], 2.0);
        assert_relative_eq!(p[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(p[1], 0.0, max_relative = 1e-12);
        assert_eq!(project_epoch_simplex(&[-1.0, -1.0], 5.0), vec![0.0, 0.0]);
    }

    #[test]
    fn capped_box_projection_cases() {
        assert_eq!(
            project_capped_sum_box(&[1.0, 2.0], 1.0, 5.0),
            vec![1.0, 2.0]
        );
        let p = project_capped_sum_box(&[0.0, 0.0], 4.0, 10.0);
        assert_relative_eq!(p[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(p[1], 2.0, max_relative = 1e-12);
        let p = project_capped_sum_box(&[6.0, 2.0], 0.0, 4.0);
        assert_relative_eq!(p.iter().sum::<f64>(), 4.0, max_relative = 1e-12);
        assert!(p[0] > p[1]);
    }

    #[test]
    fn projections_idempotent_and_nonexpansive() {
        let vectors = [
            vec![0.3, -0.7, 2.1],
            vec![1.0, 1.0, 1.0],
            vec![-5.0, 4.0, 0.2],
        ];
        for v in &vectors {
            let p = project_epoch_simplex(v, 1.5);
            let pp = project_epoch_simplex(&p, 1.5);
            for (a, b) in p.iter().zip(&pp) {
                assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-12);
            }
            let q = project_capped_sum_box(v, 0.5, 2.0);
            let qq = project_capped_sum_box(&q, 0.5, 2.0);
            for (a, b) in q.iter().zip(&qq) {
                assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-12);
            }
        }
        // Nonexpansiveness across pairs.
        let dist = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        };
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let (pi, pj) = (
                    project_epoch_simplex(&vectors[i], 1.5),
                    project_epoch_simplex(&vectors[j], 1.5),
                );
                assert!(dist(&pi, &pj) <= dist(&vectors[i], &vectors[j]) + 1e-12);
                let (qi, qj) = (
                    project_capped_sum_box(&vectors[i], 0.5, 2.0),
                    project_capped_sum_box(&vectors[j], 0.5, 2.0),
                );
                assert!(dist(&qi, &qj) <= dist(&vectors[i], &vectors[j]) + 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for model in [EnergyModel::Monomial, EnergyModel::Exponential] {
            let mut p = params();
            p.model = model;
            let tasks = vec![mk(0, 0.0, 2.0, 3e4, 1e-3), mk(1, 0.5, 2.5, 2e4, 7e-4)];
            let tl = build_timeline(&tasks).unwrap();
            let problem = build_problem(&tasks, &p, &tl).unwrap();
            let nv = problem.vars.len();
            let bits: Vec<f64> = (0..nv).map(|i| 4e3 + 500.0 * i as f64).collect();
            let durs: Vec<f64> = (0..nv).map(|i| 0.2 + 0.05 * i as f64).collect();
            let (gb, gt) = problem.gradient(&bits, &durs);
            for i in 0..nv {
                let h = 1e-3 * bits[i];
                let mut up = bits.clone();
                let mut dn = bits.clone();
                up[i] += h;
                dn[i] -= h;
                let fd = (problem.energy(&up, &durs).unwrap()
                    - problem.energy(&dn, &durs).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(gb[i], fd, max_relative = 1e-5);

                let h = 1e-5 * durs[i];
                let mut up = durs.clone();
                let mut dn = durs.clone();
                up[i] += h;
                dn[i] -= h;
                let fd = (problem.energy(&bits, &up).unwrap()
                    - problem.energy(&bits, &dn).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(gt[i], fd, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn single_mobile_matches_closed_form() {
        let p = params();
        let task = mk(0, 0.0, 2.0, 3e4, 1e-3);
        let tl = build_timeline(std::slice::from_ref(&task)).unwrap();
        let (_, obj) =
            oracle_solve(std::slice::from_ref(&task), &p, &tl, &OracleOptions::default())
                .unwrap();
        let c = mobile_coeffs(&task, &p).unwrap();
        let (_, closed) =
            crate::ordered::slave_partition(&c, &task, &p, task.latency()).unwrap();
        assert_relative_eq!(obj, closed, max_relative = 1e-6);
    }

    #[test]
    fn terrible_channel_forces_local_computing() {
        let p = params();
        let tasks = vec![mk(0, 0.0, 1.0, 1e4, 1e-15), mk(1, 0.2, 1.2, 2e4, 1e-15)];
        let tl = build_timeline(&tasks).unwrap();
        let (_, obj) = oracle_solve(&tasks, &p, &tl, &OracleOptions::default()).unwrap();
        let all_local: f64 = tasks
            .iter()
            .map(|t| local_energy(t, &p, 0.0).unwrap())
            .sum();
        assert_relative_eq!(obj, all_local, max_relative = 1e-4);
    }

    #[test]
    fn oracle_agrees_with_bcd_small_instances() {
        for model in [EnergyModel::Monomial, EnergyModel::Exponential] {
            let mut p = params();
            p.model = model;
            let tasks = vec![
                mk(0, 0.0, 3.0, 3e4, 1e-3),
                mk(1, 1.0, 4.0, 5e4, 4e-4),
                mk(2, 2.0, 3.5, 2e4, 2e-3),
            ];
            let tl = build_timeline(&tasks).unwrap();
            let (_, oracle_obj) = oracle_solve(&tasks, &p, &tl, &OracleOptions::default()).unwrap();
            let opts = crate::bcd::BcdOptions {
                tol: 1e-10,
                max_iters: 2000,
                init: None,
            };
            let (_, report) = crate::bcd::solve_bcd(&tasks, &p, &tl, &opts).unwrap();
            assert_relative_eq!(oracle_obj, report.objective_joules, max_relative = 1e-3);
        }
    }

    #[test]
    fn brute_force_sandwiches_oracle() {
        let p = params();
        // K=1, one epoch: 2 variables.
        let task = mk(0, 0.0, 2.0, 3e4, 1e-3);
        let tl = build_timeline(std::slice::from_ref(&task)).unwrap();
        let brute =
            brute_force_small(std::slice::from_ref(&task), &p, &tl, 300).unwrap();
        let (_, obj) =
            oracle_solve(std::slice::from_ref(&task), &p, &tl, &OracleOptions::default())
                .unwrap();
        // Grid minimum upper-bounds the optimum and sits near it.
        assert!(brute >= obj - 1e-12);
        assert_relative_eq!(brute, obj, max_relative = 1e-2);

        // Degenerate zero-data instance costs nothing.
        let empty = mk(0, 0.0, 1.0, 0.0, 1e-3);
        let tl = build_timeline(std::slice::from_ref(&empty)).unwrap();
        assert_eq!(
            brute_force_small(std::slice::from_ref(&empty), &p, &tl, 10).unwrap(),
            0.0
        );

        // Too many variables are rejected.
        let tasks = vec![
            mk(0, 0.0, 3.0, 3e4, 1e-3),
            mk(1, 1.0, 4.0, 5e4, 4e-4),
            mk(2, 2.0, 3.5, 2e4, 2e-3),
        ];
        let tl = build_timeline(&tasks).unwrap();
        assert!(brute_force_small(&tasks, &p, &tl, 10).is_err());
    }
}
