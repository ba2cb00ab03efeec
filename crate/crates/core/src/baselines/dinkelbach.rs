//! Dinkelbach's parametric scheme with a majorize-minimize inner solver.
//!
//! The subproblem `min_{x∈S} g(Ax) + h(x) − c·f(Kx)` is attacked by
//! linearising `−c·f(K·)` at the current point (a majorizer, since `f` is
//! convex) and taking one primal-dual step of the form used by the main
//! solvers with `θ = c`, `β = 1`. Each step backtracks on `δ` until the true
//! subproblem objective does not increase.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::FractionalProblem;
use crate::set::MEMBERSHIP_TOL;
use crate::solvers::{
    direction, stopping_check, y_update, z_update, Clock, RunOutput, RunReport, Start, StopRule,
    Termination, Trace, TraceRecord,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DinkelbachConfig {
    pub max_outer: usize,
    /// Inner step budget per subproblem.
    pub inner_budget: usize,
    pub inner_tol: f64,
    /// Smoothing parameter of the inner z-update.
    pub gamma: f64,
    /// Growth factor of `δ` during inner backtracking.
    pub growth: f64,
    pub max_backtracks: usize,
    pub tol: f64,
    pub stop_rule: StopRule,
    /// Stop once `|c_{k+1} − c_k|` drops below this.
    pub c_tol: f64,
    pub record_time: bool,
}

impl Default for DinkelbachConfig {
    fn default() -> Self {
        Self {
            max_outer: 100,
            inner_budget: 200,
            inner_tol: 1e-8,
            gamma: 1e-3,
            growth: 2.0,
            max_backtracks: 60,
            tol: 1e-6,
            stop_rule: StopRule::RelativeNext,
            c_tol: 1e-9,
            record_time: false,
        }
    }
}

impl DinkelbachConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.max_outer == 0 {
            out.push("max_outer must be at least 1".into());
        }
        if self.inner_budget == 0 {
            out.push("inner_budget must be at least 1".into());
        }
        if !(self.gamma > 0.0) {
            out.push(format!("gamma = {} must be positive", self.gamma));
        }
        if !(self.growth > 1.0) {
            out.push(format!("growth = {} must be greater than 1", self.growth));
        }
        out
    }
}

/// `g(Ax) + h(x) − c·f(Kx)`, `+∞` outside `S`.
pub fn subproblem_value(problem: &FractionalProblem, c: f64, x: &[f64]) -> f64 {
    if !problem.set.contains(x, MEMBERSHIP_TOL) {
        return f64::INFINITY;
    }
    problem.numerator(x) - c * problem.denominator(x)
}

/// Outcome of one subproblem solve.
#[derive(Debug, Clone)]
pub struct SubproblemResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub steps: usize,
    /// Objective after each accepted step, starting with the initial value.
    pub values: Vec<f64>,
}

pub fn dinkelbach_subproblem(
    problem: &FractionalProblem,
    c: f64,
    x_init: &[f64],
    budget: usize,
    config: &DinkelbachConfig,
) -> Result<SubproblemResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("subproblem budget must be positive".into()));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument(format!("parameter c = {c} must be nonnegative")));
    }
    let gamma = config.gamma;
    let floor = problem.lipschitz_h() + problem.a.norm().powi(2) / gamma;
    let mut delta = floor.max(1e-12);
    let mut x = x_init.to_vec();
    let mut value = subproblem_value(problem, c, &x);
    let mut values = vec![value];
    let mut steps = 0;
    while steps < budget {
        let y = y_update(problem, &x)?;
        let z = z_update(problem, &problem.a.apply(&x), gamma)?;
        let d = direction(problem, &x, &y, &z, c);
        // Optimistic restart so the step can grow again.
        delta = (delta / config.growth).max(1e-12);
        let mut accepted = None;
        for _ in 0..config.max_backtracks {
            let mut v = x.clone();
            linalg::axpy(1.0 / delta, &d, &mut v);
            let cand = problem.set.project(&v);
            let cv = subproblem_value(problem, c, &cand);
            if !cv.is_finite() && cv != f64::INFINITY {
                return Err(Error::Divergence(format!("subproblem value {cv}")));
            }
            if cv <= value {
                accepted = Some((cand, cv));
                break;
            }
            delta *= config.growth;
        }
        steps += 1;
        let Some((cand, cv)) = accepted else { break };
        let change = linalg::dist(&cand, &x) / linalg::norm(&cand).max(f64::EPSILON);
        x = cand;
        value = cv;
        values.push(value);
        if change <= config.inner_tol {
            break;
        }
    }
    Ok(SubproblemResult {
        x,
        value,
        steps,
        values,
    })
}

pub fn dinkelbach_run(
    problem: &FractionalProblem,
    config: &DinkelbachConfig,
    start: &Start,
) -> Result<RunOutput> {
    let v = config.violations();
    if !v.is_empty() {
        return Err(Error::InvalidArgument(v.join("; ")));
    }
    let x0 = start.x0.clone().ok_or_else(|| Error::InvalidArgument("missing x0".into()))?;
    Error::check_dim("starting point", problem.dim(), x0.len())?;
    if !problem.set.contains(&x0, MEMBERSHIP_TOL) {
        return Err(Error::InvalidArgument("starting point lies outside S".into()));
    }
    let clock = Clock::new(config.record_time);
    let mut x = x0;
    let mut c = problem.objective(&x)?;
    let mut trace = Trace::new("dinkelbach", c);
    let mut termination = Termination::MaxIterations;
    for k in 0..config.max_outer {
        let sub = dinkelbach_subproblem(problem, c.max(0.0), &x, config.inner_budget, config)?;
        let c_new = problem.objective(&sub.x)?;
        let dx = linalg::dist(&sub.x, &x);
        trace.records.push(TraceRecord {
            k: k + 1,
            theta: c_new,
            gamma: config.gamma,
            delta: 0.0,
            psi: problem.numerator(&sub.x),
            objective: c_new,
            dx,
            du: dx,
            dz: 0.0,
            jk: 0,
            ls_trials: sub.steps,
            time_s: clock.stamp(),
            denominator: problem.denominator(&sub.x),
            fenchel_lower: f64::NAN,
            z_gap: 0.0,
            z_norm: 0.0,
            guard_fired: false,
            ls_exhausted: false,
            gamma_next: config.gamma,
            delta_next: 0.0,
            stage: 0,
        });
        let done = stopping_check(&sub.x, &x, config.stop_rule, config.tol, problem.x_true.as_deref())
            || (c_new - c).abs() <= config.c_tol;
        x = sub.x;
        c = c_new;
        if done {
            termination = Termination::Converged;
            break;
        }
    }
    Ok(RunOutput {
        report: RunReport {
            method: "dinkelbach".into(),
            termination,
            iterations: trace.len(),
            objective: c,
            wall_time_s: clock.elapsed(),
        },
        x,
        state: None,
        trace,
    })
}
