//! Identical arrival-deadline order solver for m = 3 and unbounded caps:
//! scheduling order, closed-form slave partition, the master time-division
//! problem over cumulative offloading instants, effective-computing-power
//! diagnostics, and the two-user double-threshold policy.

use crate::energy::{mobile_coeffs, MobileCoeffs, SystemParams};
use crate::error::{Error, Result};
use crate::timeline::{classify_order, offload_bounds, OrderClass, TaskSpec};

/// One transmission interval of a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub bits: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

/// Non-overlapping transmission intervals, grouped per mobile.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Scheduling order as task indices.
    pub order: Vec<usize>,
    /// `intervals[k]` are mobile k's intervals, in time order.
    pub intervals: Vec<Vec<Interval>>,
}

/// Master-problem solution: durations, multipliers, and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    /// Offloading duration per scheduled position.
    pub durations: Vec<f64>,
    /// Cumulative instants `s_k`; the last equals the final deadline.
    pub cumulative: Vec<f64>,
    /// Arrival-constraint multipliers, one per interior position.
    pub mu: Vec<f64>,
    /// Deadline-constraint multipliers, one per position.
    pub omega: Vec<f64>,
    /// Nonnegativity multipliers, one per position.
    pub sigma: Vec<f64>,
    /// `P_k^(eff) = f_k(t_k)` per position.
    pub effective_power: Vec<f64>,
    pub objective_joules: f64,
    /// Scaled KKT residuals.
    pub kkt_stationarity: f64,
    pub kkt_complementarity: f64,
    pub kkt_primal: f64,
    pub kkt_dual: f64,
}

/// Duration below which a mobile counts as non-offloading.
pub const OFFLOAD_EPS: f64 = 1e-12;

fn check_applicable(tasks: &[TaskSpec], params: &SystemParams) -> Result<Vec<MobileCoeffs>> {
    params.validate()?;
    if params.monomial_order != 3.0 {
        return Err(Error::UnsupportedMonomialOrder(params.monomial_order));
    }
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    let mut coeffs = Vec::with_capacity(tasks.len());
    for task in tasks {
        task.validate()?;
        let (r_min, r_max) = offload_bounds(task);
        if r_min > 0.0 || r_max < task.data_bits {
            return Err(Error::BoundedCaps { id: task.id });
        }
        coeffs.push(mobile_coeffs(task, params)?);
    }
    Ok(coeffs)
}

/// Optimal scheduling order for an identical-order instance: arrival order.
pub fn optimal_order_identical(tasks: &[TaskSpec]) -> Result<Vec<usize>> {
    if tasks.is_empty() {
        return Err(Error::EmptyTaskList);
    }
    if classify_order(tasks) != OrderClass::Identical {
        return Err(Error::OrderMismatch {
            expected: "identical",
        });
    }
    Ok((0..tasks.len()).collect())
}

/// Closed-form per-mobile partition at a given airtime (m = 3 only):
/// `l* = theta/(1+theta) L` with `theta = sqrt(b/a) t / T`, and
/// `E*(t) = a L^3 / (sqrt(a/b) T + t)^2`.
pub fn slave_partition(
    coeffs: &MobileCoeffs,
    task: &TaskSpec,
    params: &SystemParams,
    t_k: f64,
) -> Result<(f64, f64)> {
    if params.monomial_order != 3.0 {
        return Err(Error::UnsupportedMonomialOrder(params.monomial_order));
    }
    if coeffs.r_min_bits > 0.0 || coeffs.r_max_bits < task.data_bits {
        return Err(Error::BoundedCaps { id: task.id });
    }
    if !(t_k >= 0.0) {
        return Err(Error::NonPositiveInput("airtime must be nonnegative".into()));
    }
    let latency = task.latency();
    let theta = (coeffs.b / coeffs.a).sqrt() * t_k / latency;
    let bits = theta / (1.0 + theta) * task.data_bits;
    let c = (coeffs.a / coeffs.b).sqrt() * latency;
    let energy = coeffs.a * task.data_bits.powi(3) / (c + t_k).powi(2);
    Ok((bits, energy))
}

/// Reference function `f_k(x) = a L^3 / (sqrt(a/b) T + x)^3`; twice the
/// effective computing power is minus the derivative of `E_k*`.
pub fn reference_f(coeffs: &MobileCoeffs, task: &TaskSpec, x: f64) -> f64 {
    let c = (coeffs.a / coeffs.b).sqrt() * task.latency();
    coeffs.a * task.data_bits.powi(3) / (c + x).powi(3)
}

/// Euclidean projection onto `{lo <= s <= hi, s nondecreasing}` where `lo`
/// and `hi` are themselves nondecreasing (pre-adjusted by the caller).
///
/// Bounded pool-adjacent-violators: each block's value is its mean clamped
/// into the intersection of the block's boxes. Clipping after an unbounded
/// PAV is not equivalent once a lower bound binds inside a pooled block.
fn project_monotone_box(y: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    // Blocks of (sum, len, lmax, umin, value).
    let mut blocks: Vec<(f64, usize, f64, f64, f64)> = Vec::with_capacity(y.len());
    for ((&v, &l), &h) in y.iter().zip(lo).zip(hi) {
        let mut sum = v;
        let mut len = 1usize;
        let mut lmax = l;
        let mut umin = h;
        let mut value = v.clamp(l, h);
        while let Some(&(ps, pl, plm, pum, pv)) = blocks.last() {
            if pv <= value {
                break;
            }
            sum += ps;
            len += pl;
            lmax = lmax.max(plm);
            umin = umin.min(pum);
            value = (sum / len as f64).clamp(lmax, umin);
            blocks.pop();
        }
        blocks.push((sum, len, lmax, umin, value));
    }
    let mut out = Vec::with_capacity(y.len());
    for (_, len, _, _, value) in blocks {
        out.extend(std::iter::repeat(value).take(len));
    }
    out
}

struct MasterProblem {
    /// Slave energy offsets `c_k = sqrt(a/b) T` and scales `a_k L_k^3`,
    /// indexed by scheduled position.
    c: Vec<f64>,
    al3: Vec<f64>,
    /// Monotone-adjusted interior bounds (length K-1) and the fixed horizon.
    lo: Vec<f64>,
    hi: Vec<f64>,
    horizon: f64,
}

impl MasterProblem {
    fn durations(&self, s_interior: &[f64]) -> Vec<f64> {
        let k = self.c.len();
        let mut t = Vec::with_capacity(k);
        let mut prev = 0.0;
        for i in 0..k {
            let s = if i + 1 < k { s_interior[i] } else { self.horizon };
            t.push(s - prev);
            prev = s;
        }
        t
    }

    fn energy(&self, t: &[f64]) -> f64 {
        t.iter()
            .enumerate()
            .map(|(i, &ti)| self.al3[i] / (self.c[i] + ti).powi(2))
            .sum()
    }

    fn slope(&self, i: usize, ti: f64) -> f64 {
        // dE_i*/dt = -2 a L^3 / (c + t)^3.
        -2.0 * self.al3[i] / (self.c[i] + ti).powi(3)
    }

    fn gradient(&self, t: &[f64]) -> Vec<f64> {
        (0..t.len() - 1)
            .map(|i| self.slope(i, t[i]) - self.slope(i + 1, t[i + 1]))
            .collect()
    }
}

fn build_master(
    tasks: &[TaskSpec],
    coeffs: &[MobileCoeffs],
    order: &[usize],
) -> Result<MasterProblem> {
    let k = order.len();
    let horizon = tasks[order[k - 1]].deadline;
    let mut lo = Vec::with_capacity(k.saturating_sub(1));
    let mut hi = Vec::with_capacity(k.saturating_sub(1));
    for j in 0..k - 1 {
        lo.push(tasks[order[j + 1]].arrival);
        hi.push(tasks[order[j]].deadline);
    }
    // Monotone adjustment keeps the clip-after-PAV projection exact.
    for j in 1..lo.len() {
        lo[j] = lo[j].max(lo[j - 1]);
    }
    for j in (0..hi.len()).rev() {
        let next = if j + 1 < hi.len() { hi[j + 1] } else { horizon };
        hi[j] = hi[j].min(next);
    }
    for j in 0..lo.len() {
        if lo[j] > hi[j] {
            return Err(Error::InfeasibleChain {
                k: order[j],
                next: order[j + 1],
                deadline: hi[j],
                arrival: lo[j],
            });
        }
    }
    let c = order
        .iter()
        .map(|&i| (coeffs[i].a / coeffs[i].b).sqrt() * tasks[i].latency())
        .collect();
    let al3 = order
        .iter()
        .map(|&i| coeffs[i].a * tasks[i].data_bits.powi(3))
        .collect();
    Ok(MasterProblem {
        c,
        al3,
        lo,
        hi,
        horizon,
    })
}

fn recover_multipliers(
    problem: &MasterProblem,
    s: &[f64],
    t: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, f64, f64, f64) {
    let k = t.len();
    let f: Vec<f64> = (0..k).map(|i| -0.5 * problem.slope(i, t[i])).collect();
    let atol = 1e-9 * problem.horizon.max(1.0);
    let arrival_active: Vec<bool> = (0..k.saturating_sub(1))
        .map(|i| (s[i] - problem.lo[i]).abs() <= atol)
        .collect();
    let deadline_active: Vec<bool> = (0..k.saturating_sub(1))
        .map(|i| (problem.hi[i] - s[i]).abs() <= atol)
        .collect();
    // rho_k = sum_{i>=k} omega_i - sum_{i>=k, i<K} mu_i = 2 f_k + sigma_k.
    // Offloaders pin rho at 2 f. Non-offloaders leave sigma_i >= 0 free, and
    // the recovery steers it so the chain jumps omega_i - mu_i land only on
    // active constraints: the jump at pair i must be zero when neither bound
    // binds, nonnegative with only the deadline active, nonpositive with only
    // the arrival active. The preferred value is the nearest upstream
    // offloader's rho, keeping the chain flat across inactive pairs.
    let mut rho = vec![0.0; k];
    let mut sigma = vec![0.0; k];
    let upstream = |i: usize| -> Option<f64> {
        (0..i).rev().find(|&j| t[j] > OFFLOAD_EPS).map(|j| 2.0 * f[j])
    };
    for i in (0..k).rev() {
        if t[i] > OFFLOAD_EPS {
            rho[i] = 2.0 * f[i];
            continue;
        }
        let (mut lo_b, mut hi_b) = if i + 1 < k {
            match (arrival_active[i], deadline_active[i]) {
                (true, true) => (f64::NEG_INFINITY, f64::INFINITY),
                (false, true) => (rho[i + 1], f64::INFINITY),
                (true, false) => (f64::NEG_INFINITY, rho[i + 1]),
                (false, false) => (rho[i + 1], rho[i + 1]),
            }
        } else {
            // The horizon pin makes the final deadline always active.
            (0.0, f64::INFINITY)
        };
        lo_b = lo_b.max(2.0 * f[i]);
        if lo_b > hi_b {
            // Inconsistent pattern from finite-precision primal values: keep
            // stationarity exact and let complementarity carry the residual.
            hi_b = lo_b;
        }
        rho[i] = upstream(i).unwrap_or(2.0 * f[i]).clamp(lo_b, hi_b);
        sigma[i] = rho[i] - 2.0 * f[i];
    }
    let mut mu = vec![0.0; k.saturating_sub(1)];
    let mut omega = vec![0.0; k];
    omega[k - 1] = rho[k - 1].max(0.0);
    let mut dual_res = (-rho[k - 1]).max(0.0);
    for i in 0..k - 1 {
        let d = rho[i] - rho[i + 1];
        if d >= 0.0 {
            omega[i] = d;
        } else {
            mu[i] = -d;
        }
    }
    // Complementary slackness residuals, in (power x time) units.
    let mut comp = 0.0_f64;
    for i in 0..k - 1 {
        comp = comp.max(mu[i] * (s[i] - problem.lo[i]).max(0.0));
        comp = comp.max(omega[i] * (problem.hi[i] - s[i]).max(0.0));
    }
    for i in 0..k {
        comp = comp.max(sigma[i] * t[i].max(0.0));
    }
    // Stationarity residual: exact by construction except for clamping.
    let mut stat = 0.0_f64;
    for i in 0..k {
        stat = stat.max((2.0 * f[i] + sigma[i] - rho[i]).abs());
    }
    dual_res = dual_res.max(
        sigma
            .iter()
            .chain(mu.iter())
            .chain(omega.iter())
            .fold(0.0_f64, |acc, &v| acc.max((-v).max(0.0))),
    );
    (mu, omega, sigma, f, stat, comp, dual_res)
}

/// Master solve for an arbitrary scheduling order (positions index `order`).
pub(crate) fn solve_master_ordered(
    tasks: &[TaskSpec],
    params: &SystemParams,
    order: &[usize],
) -> Result<MasterSolution> {
    let coeffs = check_applicable(tasks, params)?;
    let problem = build_master(tasks, &coeffs, order)?;
    let k = order.len();
    let horizon = problem.horizon;

    if k == 1 {
        let t = vec![horizon];
        let s = vec![horizon];
        let (mu, omega, sigma, f, stat, comp, dual) = recover_multipliers(&problem, &s, &t);
        return Ok(MasterSolution {
            objective_joules: problem.energy(&t),
            durations: t,
            cumulative: s,
            mu,
            omega,
            sigma,
            effective_power: f,
            kkt_stationarity: stat,
            kkt_complementarity: comp,
            kkt_primal: 0.0,
            kkt_dual: dual,
        });
    }

    // Projected gradient over the interior cumulative instants, internally
    // scaled so steps and tolerances are dimensionless.
    let mut s: Vec<f64> = (0..k - 1)
        .map(|j| (horizon * (j + 1) as f64 / k as f64).clamp(problem.lo[j], problem.hi[j]))
        .collect();
    s = project_monotone_box(&s, &problem.lo, &problem.hi);

    let e_ref = {
        let e0 = problem.energy(&problem.durations(&s));
        if e0 > 0.0 {
            e0
        } else {
            // Degenerate all-zero-data instance: any feasible point is optimal.
            1.0
        }
    };
    let g_scale = horizon / e_ref;

    let mut t = problem.durations(&s);
    let mut energy = problem.energy(&t) / e_ref;
    let mut step = 1.0_f64;
    let mut prev_s: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut failures = 0;
    for _ in 0..200_000 {
        let grad: Vec<f64> = problem.gradient(&t).iter().map(|g| g * g_scale).collect();

        // Fixed-point residual with a unit reference step, evaluated at the
        // current point: `s` is optimal iff it equals `P(s - grad)`.
        let probe: Vec<f64> = s
            .iter()
            .zip(&grad)
            .map(|(&si, &gi)| si - horizon * gi)
            .collect();
        let probe = project_monotone_box(&probe, &problem.lo, &problem.hi);
        let res = s
            .iter()
            .zip(&probe)
            .fold(0.0_f64, |acc, (&a, &b)| acc.max((a - b).abs() / horizon));
        if res <= 1e-13 {
            break;
        }

        // Barzilai-Borwein step with Armijo safeguard.
        if let Some((ps, pg)) = &prev_s {
            let mut sy = 0.0;
            let mut yy = 0.0;
            for j in 0..grad.len() {
                let ds = (s[j] - ps[j]) / horizon;
                let dg = grad[j] - pg[j];
                sy += ds * dg;
                yy += dg * dg;
            }
            if sy > 0.0 && yy > 0.0 {
                step = (sy / yy).clamp(1e-10, 1e10);
            }
        }

        let mut accepted = false;
        let mut trial_step = step;
        for _ in 0..70 {
            let trial: Vec<f64> = s
                .iter()
                .zip(&grad)
                .map(|(&si, &gi)| si - trial_step * horizon * gi)
                .collect();
            let trial = project_monotone_box(&trial, &problem.lo, &problem.hi);
            let tt = problem.durations(&trial);
            let te = problem.energy(&tt) / e_ref;
            let descent: f64 = grad
                .iter()
                .zip(s.iter().zip(&trial))
                .map(|(&g, (&a, &b))| g * (a - b) / horizon)
                .sum();
            if te <= energy - 1e-4 * descent.max(0.0) + 1e-16 {
                prev_s = Some((s.clone(), grad.clone()));
                s = trial;
                t = tt;
                energy = te;
                step = trial_step;
                accepted = true;
                failures = 0;
                break;
            }
            trial_step *= 0.5;
        }
        if !accepted {
            // A poisoned curvature estimate can reject every backtracked
            // trial; forget it and retry from a conservative step.
            prev_s = None;
            step = 1e-8;
            failures += 1;
            if failures >= 5 {
                break;
            }
        }
    }

    let mut s_full = s.clone();
    s_full.push(horizon);
    let (mu, omega, sigma, f, stat, comp, dual) = recover_multipliers(&problem, &s_full, &t);
    let p_scale = f.iter().fold(0.0_f64, |acc, &v| acc.max(2.0 * v)).max(1e-300);
    let mut primal = t.iter().fold(0.0_f64, |acc, &ti| acc.max((-ti).max(0.0)));
    for j in 0..k - 1 {
        primal = primal.max(problem.lo[j] - s[j]).max(s[j] - problem.hi[j]);
    }
    Ok(MasterSolution {
        objective_joules: energy * e_ref,
        durations: t,
        cumulative: s_full,
        mu,
        omega,
        sigma,
        effective_power: f,
        kkt_stationarity: stat / p_scale,
        kkt_complementarity: comp / (p_scale * horizon),
        kkt_primal: primal / horizon,
        kkt_dual: dual / p_scale,
    })
}

/// Master time-division solve in the canonical arrival order.
pub fn solve_master(tasks: &[TaskSpec], params: &SystemParams) -> Result<MasterSolution> {
    let order = optimal_order_identical(tasks)?;
    solve_master_ordered(tasks, params, &order)
}

/// Corollary-2 classification of one adjacent offloading pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjacentCase {
    /// Interior instant: effective powers balance.
    Equal,
    /// Arrival constraint active: power may step up.
    ArrivalActive,
    /// Deadline constraint active: power may step down.
    DeadlineActive,
    /// One side is non-offloading; the comparison is skipped.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePowerReport {
    /// Case per adjacent position pair (k, k+1).
    pub cases: Vec<AdjacentCase>,
    /// Whether every non-skipped pair satisfies its case inequality.
    pub inequalities_hold: bool,
    /// Pairs skipped because of a non-offloading side.
    pub skipped_pairs: Vec<usize>,
}

/// Structure check of the effective computing powers against the
/// active-constraint pattern of the master solution.
pub fn effective_power_report(
    solution: &MasterSolution,
    tasks: &[TaskSpec],
) -> EffectivePowerReport {
    let k = solution.durations.len();
    let horizon = tasks[k - 1].deadline;
    let tol = 1e-6;
    let atol = 1e-9 * horizon.max(1.0);
    let mut cases = Vec::with_capacity(k.saturating_sub(1));
    let mut skipped = Vec::new();
    let mut holds = true;
    for j in 0..k.saturating_sub(1) {
        if solution.durations[j] <= OFFLOAD_EPS || solution.durations[j + 1] <= OFFLOAD_EPS {
            cases.push(AdjacentCase::Skipped);
            skipped.push(j);
            continue;
        }
        let p0 = solution.effective_power[j];
        let p1 = solution.effective_power[j + 1];
        let scale = p0.abs().max(p1.abs()).max(1e-300);
        let s = solution.cumulative[j];
        let lo = tasks[j + 1].arrival;
        let hi = tasks[j].deadline;
        let case = if (s - lo).abs() <= atol && (s - hi).abs() > atol {
            AdjacentCase::ArrivalActive
        } else if (s - hi).abs() <= atol && (s - lo).abs() > atol {
            AdjacentCase::DeadlineActive
        } else {
            AdjacentCase::Equal
        };
        let ok = match case {
            AdjacentCase::Equal => (p0 - p1).abs() / scale <= tol,
            AdjacentCase::ArrivalActive => p0 <= p1 + tol * scale,
            AdjacentCase::DeadlineActive => p0 >= p1 - tol * scale,
            AdjacentCase::Skipped => true,
        };
        holds &= ok;
        cases.push(case);
    }
    EffectivePowerReport {
        cases,
        inequalities_hold: holds,
        skipped_pairs: skipped,
    }
}

/// Which Corollary-3 branch the two-user policy lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoUserRegime {
    /// `d_11 >= d_22`: mobile 1 takes its whole window.
    FirstSaturated,
    /// `d_12 <= d_21`: mobile 1 is squeezed to the second arrival.
    FirstSqueezed,
    /// Interior: powers balance at a shared multiplier.
    Balanced,
}

/// Closed-form two-user time division (double-threshold policy).
pub fn solve_two_user(
    tasks: &[TaskSpec],
    params: &SystemParams,
) -> Result<(f64, f64, TwoUserRegime)> {
    let coeffs = check_applicable(tasks, params)?;
    if tasks.len() != 2 {
        return Err(Error::InstanceTooLarge(format!(
            "two-user policy requires exactly 2 tasks, got {}",
            tasks.len()
        )));
    }
    let (t1a, t2a) = (tasks[0].arrival, tasks[1].arrival);
    let (t1d, t2d) = (tasks[0].deadline, tasks[1].deadline);
    if !(t1a == 0.0 && t1a < t2a && t2a < t1d && t1d < t2d) {
        return Err(Error::OrderMismatch {
            expected: "strict identical two-user (0 = a1 < a2 < d1 < d2)",
        });
    }
    let t1_min = t2a;
    let t1_max = t1d;
    let t2_min = t2d - t1d;
    let t2_max = t2d - t2a;

    let d11 = 2.0 * reference_f(&coeffs[0], &tasks[0], t1_max);
    let d12 = 2.0 * reference_f(&coeffs[0], &tasks[0], t1_min);
    let d21 = 2.0 * reference_f(&coeffs[1], &tasks[1], t2_max);
    let d22 = 2.0 * reference_f(&coeffs[1], &tasks[1], t2_min);

    if d11 >= d22 {
        return Ok((t1_max, t2_min, TwoUserRegime::FirstSaturated));
    }
    if d12 <= d21 {
        return Ok((t1_min, t2_max, TwoUserRegime::FirstSqueezed));
    }

    // Interior: bisect the shared multiplier omega in 2 f_k(t_k) = omega.
    let c1 = (coeffs[0].a / coeffs[0].b).sqrt() * tasks[0].latency();
    let c2 = (coeffs[1].a / coeffs[1].b).sqrt() * tasks[1].latency();
    let al1 = coeffs[0].a * tasks[0].data_bits.powi(3);
    let al2 = coeffs[1].a * tasks[1].data_bits.powi(3);
    let total = |omega: f64| {
        let t1 = ((2.0 * al1 / omega).cbrt() - c1).clamp(t1_min, t1_max);
        let t2 = ((2.0 * al2 / omega).cbrt() - c2).clamp(t2_min, t2_max);
        (t1, t2)
    };
    let mut lo = d11.min(d21);
    let mut hi = d12.max(d22);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (t1, t2) = total(mid);
        if t1 + t2 > t2d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (t1, _) = total(0.5 * (lo + hi));
    // Pin the horizon exactly.
    Ok((t1, t2d - t1, TwoUserRegime::Balanced))
}

/// Turn a master solution into contiguous per-mobile intervals carrying the
/// slave-optimal bit loads.
pub fn expand_to_schedule(
    order: &[usize],
    solution: &MasterSolution,
    tasks: &[TaskSpec],
    params: &SystemParams,
) -> Result<Schedule> {
    let mut intervals = vec![Vec::new(); tasks.len()];
    let mut start = 0.0;
    for (j, &k) in order.iter().enumerate() {
        let t = solution.durations[j];
        let end = solution.cumulative[j];
        if t > OFFLOAD_EPS {
            let coeffs = mobile_coeffs(&tasks[k], params)?;
            let (bits, _) = slave_partition(&coeffs, &tasks[k], params, t)?;
            intervals[k].push(Interval { start, end, bits });
        }
        start = end;
    }
    Ok(Schedule {
        order: order.to_vec(),
        intervals,
    })
}

/// Project a schedule onto the epoch grid: each interval's overlap with an
/// epoch carries a proportional share of its bits, preserving the rate and
/// hence the transmission energy.
pub fn schedule_to_allocation(
    schedule: &Schedule,
    timeline: &crate::timeline::Timeline,
) -> crate::energy::Allocation {
    let mut alloc = crate::energy::Allocation::default();
    for (k, intervals) in schedule.intervals.iter().enumerate() {
        for &n in &timeline.epoch_sets[k] {
            let (e_start, e_end) = (timeline.boundaries[n], timeline.boundaries[n + 1]);
            let mut bits = 0.0;
            let mut dur = 0.0;
            for iv in intervals {
                let overlap = (iv.end.min(e_end) - iv.start.max(e_start)).max(0.0);
                if overlap > 0.0 && iv.len() > 0.0 {
                    bits += iv.bits * overlap / iv.len();
                    dur += overlap;
                }
            }
            alloc.bits.insert((k, n), bits);
            alloc.durations.insert((k, n), dur);
        }
    }
    alloc
}

/// Full identical-order solve: master durations expanded to a schedule.
pub fn solve_identical(
    tasks: &[TaskSpec],
    params: &SystemParams,
) -> Result<(Schedule, MasterSolution)> {
    let order = optimal_order_identical(tasks)?;
    let solution = solve_master_ordered(tasks, params, &order)?;
    let schedule = expand_to_schedule(&order, &solution, tasks, params)?;
    Ok((schedule, solution))
}
