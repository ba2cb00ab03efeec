//! Two-dimensional sparse recovery with a 2×2 cosine-transform matrix.

use std::sync::Arc;

use crate::function::{L1Norm, L2Norm};
use crate::operator::Operator;
use crate::problem::FractionalProblem;
use crate::set::BoxSet;
use crate::smooth::SquaredResidual;
use crate::solvers::conceptual::{DeltaSchedule, GammaSchedule, Schedules};
use crate::solvers::Start;

pub const DCT: [f64; 4] = [0.7071, 0.7071, 0.7071, -0.7071];
pub const TAU: f64 = 1e-3;
pub const X_TRUE: [f64; 2] = [1.0, 0.0];
pub const THETA0: f64 = 0.8053;

#[derive(Debug, Clone)]
pub struct ToySetup {
    pub problem: FractionalProblem,
    pub start: Start,
    pub schedules: Schedules,
}

/// `S = [0,1]²`, `A = K = I`, `g = τ‖·‖₁`, `h = ½‖Bx − b‖²`, `f = ‖·‖`,
/// with `b = Bx*` and `x* = (1, 0)`.
pub fn make_toy_recovery() -> ToySetup {
    let b_op = Operator::dense(2, 2, DCT.to_vec()).expect("2x2 data");
    let b = b_op.apply(&X_TRUE);
    let problem = FractionalProblem::new(
        Arc::new(BoxSet::uniform(2, 0.0, 1.0).expect("unit box")),
        Operator::identity(2),
        Operator::identity(2),
        Arc::new(L1Norm { tau: TAU }),
        Arc::new(L2Norm),
        Arc::new(SquaredResidual::new(b_op, Some(b), 1.0)),
    )
    .expect("consistent dimensions")
    .with_truth(X_TRUE.to_vec());
    ToySetup {
        problem,
        start: Start {
            x0: Some(vec![0.2, 1.0]),
            u0: Some(vec![0.2, 1.0]),
            z0: Some(vec![1e-3, 1e-3]),
            theta0: Some(THETA0),
        },
        schedules: Schedules {
            gamma: GammaSchedule::Geometric {
                gamma0: 1.0,
                ratio: 0.9999,
            },
            delta: DeltaSchedule::Standard { offset: 5.0 },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_and_optimum() {
        let t = make_toy_recovery();
        let p = &t.problem;
        let b = p.h.spec().unwrap();
        let json = serde_json::to_value(&b).unwrap();
        assert_eq!(json["target"], serde_json::json!([0.7071, 0.7071]));
        assert!((p.objective(&X_TRUE).unwrap() - 1e-3).abs() < 1e-15);
        // ‖B‖² = 2·0.7071².
        assert!((p.lipschitz_h() - 2.0 * 0.7071f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn initial_ratio_is_the_objective_at_the_start() {
        let t = make_toy_recovery();
        let f0 = t.problem.objective(&[0.2, 1.0]).unwrap();
        assert!((f0 - THETA0).abs() < 1e-4, "F(x0) = {f0}");
    }
}
