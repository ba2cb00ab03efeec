//! Instance on which the exact (γ ≡ 0) scheme cycles forever.

use std::sync::Arc;

use crate::function::{Affine, L1Norm};
use crate::operator::Operator;
use crate::problem::FractionalProblem;
use crate::set::BoxSet;
use crate::smooth::SquaredResidual;
use crate::solvers::Start;

/// `S = [0,1]²`, `A = K = I`, `g = ‖·‖₁`, `h = ½‖·‖²`, `f(x) = eᵀx + 0.5`;
/// start `x⁰ = u⁰ = z⁰ = (0, 1)`, `θ₀ = 1`.
pub fn make_divergence_instance() -> (FractionalProblem, Start) {
    let problem = FractionalProblem::new(
        Arc::new(BoxSet::uniform(2, 0.0, 1.0).expect("unit box")),
        Operator::identity(2),
        Operator::identity(2),
        Arc::new(L1Norm { tau: 1.0 }),
        Arc::new(Affine {
            a: vec![1.0, 1.0],
            c: 0.5,
        }),
        Arc::new(SquaredResidual::new(Operator::identity(2), None, 1.0)),
    )
    .expect("consistent dimensions");
    let start = Start {
        x0: Some(vec![0.0, 1.0]),
        u0: Some(vec![0.0, 1.0]),
        z0: Some(vec![0.0, 1.0]),
        theta0: Some(1.0),
    };
    (problem, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_points() {
        let (p, _) = make_divergence_instance();
        assert_eq!(p.denominator(&[0.0, 1.0]), 1.5);
        assert_eq!(p.objective(&[1.0, 0.0]).unwrap(), 1.0);
        assert!(p.set.contains(&[1.0, 0.0], 0.0) && p.set.contains(&[0.0, 1.0], 0.0));
    }
}
