//! Adaptive scheme with a nonmonotone line search on `δ`.

use std::collections::VecDeque;

use super::adaptive::z_guard_bound;
use super::{
    check_start, direction, fenchel_lower, initial_theta, psi_with, stopping_check, y_update,
    z_fenchel_gap, z_update, Clock, FspsConfig, RunOutput, RunReport, SolverState, Start,
    Termination, Trace, TraceRecord,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::FractionalProblem;

/// Runs every configured stage in turn, each warm-started from the previous
/// stage's last iterate with `u = x` and `γ` reset to `γ₀`. Without stages
/// this is a single run.
pub fn nls_run(problem: &FractionalProblem, config: &FspsConfig, start: &Start) -> Result<RunOutput> {
    config.validate()?;
    if config.stages.is_empty() {
        return nls_stage(problem, config, start, 0, Trace::new("nls", 0.0), 0.0);
    }
    let mut current = start.clone();
    let mut trace = Trace::new("nls", 0.0);
    let mut out = None;
    let mut offset = 0.0;
    for (i, stage) in config.stages.iter().enumerate() {
        let cfg = config.with_stage(stage);
        let run = nls_stage(problem, &cfg, &current, i, trace, offset)?;
        offset += run.report.wall_time_s;
        current = Start {
            x0: Some(run.x.clone()),
            u0: Some(run.x.clone()),
            z0: run.state.as_ref().map(|s| s.z.clone()),
            theta0: None,
        };
        trace = run.trace.clone();
        out = Some(run);
    }
    let mut run = out.expect("at least one stage");
    run.report.iterations = run.trace.len();
    run.report.wall_time_s = offset;
    Ok(run)
}

fn nls_stage(
    problem: &FractionalProblem,
    config: &FspsConfig,
    start: &Start,
    stage: usize,
    mut trace: Trace,
    time_offset: f64,
) -> Result<RunOutput> {
    let x0 = start.x0.clone().ok_or_else(|| Error::InvalidArgument("missing x0".into()))?;
    check_start(problem, &x0)?;
    let gamma0 = config.gamma0;
    let theta0 = initial_theta(problem, &x0, start.theta0.or(config.theta0))?;
    if trace.records.is_empty() {
        trace.theta0 = theta0;
    }
    let mut state = SolverState {
        u: start.u0.clone().unwrap_or_else(|| x0.clone()),
        z: start.z0.clone().unwrap_or_else(|| vec![0.0; problem.a.output_dim()]),
        y: vec![0.0; problem.k.output_dim()],
        x: x0,
        theta: theta0,
        gamma: gamma0,
        delta: config.delta0.unwrap_or_else(|| config.standard_delta(problem, gamma0)),
        k: 0,
    };
    let mut history: VecDeque<f64> = VecDeque::with_capacity(config.memory + 1);
    history.push_back(problem.objective(&state.x)?);
    let mut den = problem.denominator(&state.x);
    let clock = Clock::new(config.record_time);
    let mut termination = Termination::MaxIterations;

    for _ in 0..config.max_iter {
        let ax = problem.a.apply(&state.x);
        let mut accepted = None;
        for j in 0..config.gamma_budget {
            let gamma_j = state.gamma * config.q.powi(j as i32);
            let z = z_update(problem, &ax, gamma_j)?;
            let psi = psi_with(problem, &state.x, &ax, &z, &state.u, state.delta, gamma_j);
            if psi / den > 0.0 {
                accepted = Some((j, gamma_j, z, psi));
                break;
            }
        }
        let Some((jk, gamma, z, psi)) = accepted else {
            return Err(Error::ThetaBacktrackExhausted {
                iteration: trace.records.len(),
                attempts: config.gamma_budget,
                trace: Box::new(trace),
            });
        };
        let theta = psi / den;
        let delta_base = config.standard_delta(problem, gamma);
        let y = y_update(problem, &state.x)?;
        let d = direction(problem, &state.x, &y, &z, theta);
        let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        // On budget exhaustion the last trial (largest δ, shortest step) is kept.
        let mut trial = None;
        let mut ls_exhausted = true;
        let mut scale = config.mu;
        for s in 0..config.ls_budget {
            let delta_s = scale * delta_base;
            let mut v = state.u.clone();
            linalg::axpy(1.0 / delta_s, &d, &mut v);
            let cand = problem.set.project(&v);
            let f_cand = problem.objective_or_inf(&cand);
            let step = linalg::dist(&state.x, &cand);
            let ok = f_cand <= reference - 0.5 * config.c * step * step;
            trial = Some((s + 1, delta_s, cand, f_cand));
            if ok {
                ls_exhausted = false;
                break;
            }
            scale *= config.eta;
        }
        let (ls_trials, delta, x, f_new) = trial.expect("ls_budget >= 1");

        let u: Vec<f64> = state
            .u
            .iter()
            .zip(&x)
            .map(|(ui, xi)| ui - config.beta * (ui - xi))
            .collect();
        let z_norm = linalg::norm(&z);
        let guard_fired = z_norm > z_guard_bound(config.epsilon, gamma);
        let (gamma_next, delta_next) = if guard_fired {
            let g = gamma * config.q;
            (g, config.standard_delta(problem, g))
        } else {
            (gamma, delta)
        };
        let den_new = problem.denominator(&x);
        if !(den_new > 0.0) {
            return Err(Error::ModelViolation(format!("f(Kx) = {den_new} is not positive")));
        }

        trace.records.push(TraceRecord {
            k: trace.records.len() + 1,
            theta,
            gamma,
            delta,
            psi,
            objective: f_new,
            dx: linalg::dist(&x, &state.x),
            du: linalg::dist(&u, &state.u),
            dz: linalg::dist(&z, &state.z),
            jk,
            ls_trials,
            time_s: if config.record_time { time_offset + clock.stamp() } else { 0.0 },
            denominator: den_new,
            fenchel_lower: fenchel_lower(problem, &x, &y),
            z_gap: z_fenchel_gap(problem, &ax, &z, gamma),
            z_norm,
            guard_fired,
            ls_exhausted,
            gamma_next,
            delta_next,
            stage,
        });

        let done = stopping_check(&x, &state.x, config.stop_rule, config.tol, problem.x_true.as_deref());
        history.push_back(f_new);
        if history.len() > config.memory + 1 {
            history.pop_front();
        }
        den = den_new;
        state = SolverState {
            x,
            y,
            z,
            u,
            theta,
            gamma: gamma_next,
            delta: delta_next,
            k: state.k + 1,
        };
        if done {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(RunOutput {
        x: state.x.clone(),
        report: RunReport {
            method: "nls".into(),
            termination,
            iterations: trace.records.len(),
            objective: problem.objective_or_inf(&state.x),
            wall_time_s: clock.elapsed(),
        },
        state: Some(state),
        trace,
    })
}
