//! The basic update with externally chosen `γ_k`, `δ_k`.

use serde::{Deserialize, Serialize};

use super::{
    check_start, initial_theta, psi_with, stopping_check, x_update, y_update, z_fenchel_gap,
    z_update, Clock, FspsConfig, RunOutput, RunReport, SolverState, Start, Termination, Trace,
    TraceRecord,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::FractionalProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaSchedule {
    Constant { value: f64 },
    /// `γ_k = gamma0 · ratio^k`.
    Geometric { gamma0: f64, ratio: f64 },
}

impl GammaSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            GammaSchedule::Constant { value } => value,
            GammaSchedule::Geometric { gamma0, ratio } => gamma0 * ratio.powi(k as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSchedule {
    Constant { value: f64 },
    /// `δ_k = offset + L + 2‖A‖²/γ_k`.
    Standard { offset: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedules {
    pub gamma: GammaSchedule,
    pub delta: DeltaSchedule,
}

impl Schedules {
    pub fn delta_at(&self, problem: &FractionalProblem, gamma: f64) -> f64 {
        match self.delta {
            DeltaSchedule::Constant { value } => value,
            DeltaSchedule::Standard { offset } => {
                offset + problem.lipschitz_h() + 2.0 * problem.a.norm().powi(2) / gamma
            }
        }
    }
}

/// One step `k → k+1` with the given `γ_k`, `δ_k`, `β`.
pub fn fsps_step(
    problem: &FractionalProblem,
    state: &SolverState,
    gamma: f64,
    delta: f64,
    beta: f64,
) -> Result<(SolverState, TraceRecord)> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma_k = {gamma} must be positive")));
    }
    let y = y_update(problem, &state.x)?;
    let x = x_update(problem, &state.x, &state.u, &y, &state.z, state.theta, delta);
    let u: Vec<f64> = state
        .u
        .iter()
        .zip(&x)
        .map(|(ui, xi)| (1.0 - beta) * ui + beta * xi)
        .collect();
    let ax = problem.a.apply(&x);
    let z = z_update(problem, &ax, gamma)?;
    let den = problem.denominator(&x);
    if !(den > 0.0) {
        return Err(Error::ModelViolation(format!("f(Kx) = {den} is not positive")));
    }
    let psi = psi_with(problem, &x, &ax, &z, &u, delta, gamma);
    let theta = psi / den;
    let record = TraceRecord {
        k: state.k + 1,
        theta,
        gamma,
        delta,
        psi,
        objective: problem.objective_or_inf(&x),
        dx: linalg::dist(&x, &state.x),
        du: linalg::dist(&u, &state.u),
        dz: linalg::dist(&z, &state.z),
        jk: 0,
        ls_trials: 0,
        time_s: 0.0,
        denominator: den,
        fenchel_lower: super::fenchel_lower(problem, &x, &y),
        z_gap: z_fenchel_gap(problem, &ax, &z, gamma),
        z_norm: linalg::norm(&z),
        guard_fired: false,
        ls_exhausted: false,
        gamma_next: gamma,
        delta_next: delta,
        stage: 0,
    };
    let next = SolverState {
        x,
        y,
        z,
        u,
        theta,
        gamma,
        delta,
        k: state.k + 1,
    };
    Ok((next, record))
}

/// Runs the basic scheme until the stopping rule holds or `max_iter` steps.
pub fn fsps_run(
    problem: &FractionalProblem,
    config: &FspsConfig,
    schedules: &Schedules,
    start: &Start,
) -> Result<RunOutput> {
    config.validate()?;
    let x0 = start.x0.clone().ok_or_else(|| Error::InvalidArgument("missing x0".into()))?;
    check_start(problem, &x0)?;
    let theta0 = initial_theta(problem, &x0, start.theta0.or(config.theta0))?;
    let gamma0 = schedules.gamma.at(0);
    let mut state = SolverState {
        u: start.u0.clone().unwrap_or_else(|| x0.clone()),
        z: start.z0.clone().unwrap_or_else(|| vec![0.0; problem.a.output_dim()]),
        y: vec![0.0; problem.k.output_dim()],
        x: x0,
        theta: theta0,
        gamma: gamma0,
        delta: schedules.delta_at(problem, gamma0),
        k: 0,
    };
    let clock = Clock::new(config.record_time);
    let mut trace = Trace::new("fsps", theta0);
    let mut termination = Termination::MaxIterations;
    for k in 0..config.max_iter {
        let gamma = schedules.gamma.at(k);
        let delta = schedules.delta_at(problem, gamma);
        let (next, mut record) = fsps_step(problem, &state, gamma, delta, config.beta)?;
        let gamma_next = schedules.gamma.at(k + 1);
        record.gamma_next = gamma_next;
        record.delta_next = schedules.delta_at(problem, gamma_next);
        record.time_s = clock.stamp();
        trace.records.push(record);
        let done = stopping_check(
            &next.x,
            &state.x,
            config.stop_rule,
            config.tol,
            problem.x_true.as_deref(),
        );
        state = next;
        if done {
            termination = Termination::Converged;
            break;
        }
    }
    Ok(RunOutput {
        x: state.x.clone(),
        report: RunReport {
            method: "fsps".into(),
            termination,
            iterations: state.k,
            objective: problem.objective_or_inf(&state.x),
            wall_time_s: clock.elapsed(),
        },
        state: Some(state),
        trace,
    })
}
