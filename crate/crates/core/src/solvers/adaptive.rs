//! Adaptive scheme: γ backtracking keeps `θ_k > 0`, a z-norm guard shrinks γ.

use super::{
    check_start, fenchel_lower, initial_theta, psi_with, stopping_check, x_update, y_update,
    z_fenchel_gap, z_update, Clock, FspsConfig, RunOutput, RunReport, SolverState, Start,
    Termination, Trace, TraceRecord,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::FractionalProblem;

/// Guard threshold `min(ε/γ, √(2ε/γ))`.
pub fn z_guard_bound(epsilon: f64, gamma: f64) -> f64 {
    (epsilon / gamma).min((2.0 * epsilon / gamma).sqrt())
}

pub fn adaptive_fsps_run(
    problem: &FractionalProblem,
    config: &FspsConfig,
    start: &Start,
) -> Result<RunOutput> {
    config.validate()?;
    let x0 = start.x0.clone().ok_or_else(|| Error::InvalidArgument("missing x0".into()))?;
    check_start(problem, &x0)?;
    let theta0 = initial_theta(problem, &x0, start.theta0.or(config.theta0))?;
    let gamma0 = config.gamma0;
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
    let clock = Clock::new(config.record_time);
    let mut trace = Trace::new("adaptive", theta0);
    let mut termination = Termination::MaxIterations;
    let beta = config.beta;

    for _ in 0..config.max_iter {
        let y = y_update(problem, &state.x)?;
        let x = x_update(problem, &state.x, &state.u, &y, &state.z, state.theta, state.delta);
        let u: Vec<f64> = state
            .u
            .iter()
            .zip(&x)
            .map(|(ui, xi)| (1.0 - beta) * ui + beta * xi)
            .collect();
        let den = problem.denominator(&x);
        if !(den > 0.0) {
            return Err(Error::ModelViolation(format!("f(Kx) = {den} is not positive")));
        }
        let ax = problem.a.apply(&x);

        let mut accepted = None;
        for j in 0..config.gamma_budget {
            let gamma_j = state.gamma * config.q.powi(j as i32);
            let z = z_update(problem, &ax, gamma_j)?;
            let psi = psi_with(problem, &x, &ax, &z, &u, state.delta, gamma_j);
            if psi / den > 0.0 {
                accepted = Some((j, gamma_j, z, psi));
                break;
            }
        }
        let Some((jk, gamma_used, z, psi)) = accepted else {
            return Err(Error::ThetaBacktrackExhausted {
                iteration: state.k,
                attempts: config.gamma_budget,
                trace: Box::new(trace),
            });
        };
        let theta = psi / den;

        let mut gamma_next = gamma_used;
        let z_norm = linalg::norm(&z);
        let guard_fired = z_norm > z_guard_bound(config.epsilon, gamma_next);
        if guard_fired {
            gamma_next *= config.q;
        }
        let delta_next = config.standard_delta(problem, gamma_next);

        trace.records.push(TraceRecord {
            k: state.k + 1,
            theta,
            gamma: gamma_used,
            delta: state.delta,
            psi,
            objective: problem.objective_or_inf(&x),
            dx: linalg::dist(&x, &state.x),
            du: linalg::dist(&u, &state.u),
            dz: linalg::dist(&z, &state.z),
            jk,
            ls_trials: 0,
            time_s: clock.stamp(),
            denominator: den,
            fenchel_lower: fenchel_lower(problem, &x, &y),
            z_gap: z_fenchel_gap(problem, &ax, &z, gamma_used),
            z_norm,
            guard_fired,
            ls_exhausted: false,
            gamma_next,
            delta_next,
            stage: 0,
        });

        let done = stopping_check(&x, &state.x, config.stop_rule, config.tol, problem.x_true.as_deref());
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
            method: "adaptive".into(),
            termination,
            iterations: state.k,
            objective: problem.objective_or_inf(&state.x),
            wall_time_s: clock.elapsed(),
        },
        state: Some(state),
        trace,
    })
}
