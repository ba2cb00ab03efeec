//! The γ ≡ 0 variant of the basic scheme on the cycling instance.

use crate::error::{Error, Result};
use crate::linalg;
use crate::problems::make_divergence_instance;
use crate::solvers::{fenchel_lower, psi, x_update, y_update, z_fenchel_gap, Trace, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceIterate {
    pub k: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct DivergenceRun {
    /// Iterates `k = 1..=iterations`.
    pub iterates: Vec<DivergenceIterate>,
    pub trace: Trace,
}

/// Minimum-norm maximiser of `⟨z, w⟩` over the unit ∞-ball.
fn min_norm_z(w: &[f64]) -> Vec<f64> {
    w.iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Runs `β = 1`, `γ_k ≡ 0`, `δ_k ≡ 1`, `θ₀ = 1` from `(0, 1)`.
pub fn divergence_harness(iterations: usize) -> Result<DivergenceRun> {
    if iterations < 2 {
        return Err(Error::InvalidArgument("divergence harness needs at least 2 iterations".into()));
    }
    let (problem, start) = make_divergence_instance();
    let (delta, gamma, beta) = (1.0, 0.0, 1.0);
    let mut x = start.x0.expect("start x");
    let mut u = start.u0.expect("start u");
    let mut z = start.z0.expect("start z");
    let mut theta = start.theta0.expect("start theta");
    let mut trace = Trace::new("diverge", theta);
    let mut iterates = Vec::with_capacity(iterations);
    for k in 1..=iterations {
        let y = y_update(&problem, &x)?;
        let x_new = x_update(&problem, &x, &u, &y, &z, theta, delta);
        let u_new: Vec<f64> = u
            .iter()
            .zip(&x_new)
            .map(|(ui, xi)| (1.0 - beta) * ui + beta * xi)
            .collect();
        let ax = problem.a.apply(&x_new);
        let z_new = min_norm_z(&ax);
        let p = psi(&problem, &x_new, &z_new, &u_new, delta, gamma);
        let den = problem.denominator(&x_new);
        let theta_new = p / den;
        trace.records.push(TraceRecord {
            k,
            theta: theta_new,
            gamma,
            delta,
            psi: p,
            objective: problem.objective_or_inf(&x_new),
            dx: linalg::dist(&x_new, &x),
            du: linalg::dist(&u_new, &u),
            dz: linalg::dist(&z_new, &z),
            jk: 0,
            ls_trials: 0,
            time_s: 0.0,
            denominator: den,
            fenchel_lower: fenchel_lower(&problem, &x_new, &y),
            z_gap: z_fenchel_gap(&problem, &ax, &z_new, gamma),
            z_norm: linalg::norm(&z_new),
            guard_fired: false,
            ls_exhausted: false,
            gamma_next: gamma,
            delta_next: delta,
            stage: 0,
        });
        iterates.push(DivergenceIterate {
            k,
            x: x_new.clone(),
            y,
            z: z_new.clone(),
            u: u_new.clone(),
            theta: theta_new,
        });
        x = x_new;
        u = u_new;
        z = z_new;
        theta = theta_new;
    }
    Ok(DivergenceRun { iterates, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_steps() {
        let run = divergence_harness(2).unwrap();
        assert_eq!(run.iterates[0].x, vec![1.0, 0.0]);
        assert_eq!(run.iterates[0].theta, 1.0);
        assert_eq!(run.iterates[1].x, vec![0.0, 1.0]);
        assert!(divergence_harness(1).is_err());
    }
}
