//! Smooth terms `h` with Lipschitz gradients.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg;
use crate::operator::{Operator, OperatorSpec};

pub trait SmoothFunction: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;
    fn spec(&self) -> Option<SmoothSpec> {
        None
    }
}

pub type Smooth = Arc<dyn SmoothFunction>;

/// `(w/2)‖Bx − t‖²`. The weight may be negative (used by convexification).
#[derive(Debug, Clone)]
pub struct SquaredResidual {
    pub op: Operator,
    pub target: Option<Vec<f64>>,
    pub weight: f64,
}

impl SquaredResidual {
    pub fn new(op: Operator, target: Option<Vec<f64>>, weight: f64) -> Self {
        Self { op, target, weight }
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.op.apply(x);
        if let Some(t) = &self.target {
            linalg::axpy(-1.0, t, &mut r);
        }
        r
    }
}

impl SmoothFunction for SquaredResidual {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.weight * linalg::norm_sq(&self.residual(x))
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let g = self.op.adjoint(&self.residual(x));
        linalg::scale(&g, self.weight)
    }
    fn lipschitz(&self) -> f64 {
        self.weight.abs() * self.op.norm().powi(2)
    }
    fn spec(&self) -> Option<SmoothSpec> {
        Some(SmoothSpec::SquaredResidual {
            op: self.op.spec()?,
            target: self.target.clone(),
            weight: self.weight,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Constant {
    pub c: f64,
    pub dim: usize,
}

impl SmoothFunction for Constant {
    fn value(&self, _x: &[f64]) -> f64 {
        self.c
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn spec(&self) -> Option<SmoothSpec> {
        Some(SmoothSpec::Constant {
            c: self.c,
            dim: self.dim,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Sum {
    pub terms: Vec<Smooth>,
}

impl SmoothFunction for Sum {
    fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(x)).sum()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for t in &self.terms {
            linalg::axpy(1.0, &t.gradient(x), &mut g);
        }
        g
    }
    /// Sum of the parts' constants (an upper bound).
    fn lipschitz(&self) -> f64 {
        self.terms.iter().map(|t| t.lipschitz()).sum()
    }
    fn spec(&self) -> Option<SmoothSpec> {
        let terms = self.terms.iter().map(|t| t.spec()).collect::<Option<Vec<_>>>()?;
        Some(SmoothSpec::Sum { terms })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothSpec {
    SquaredResidual {
        op: OperatorSpec,
        #[serde(default)]
        target: Option<Vec<f64>>,
        weight: f64,
    },
    Constant {
        c: f64,
        dim: usize,
    },
    Sum {
        terms: Vec<SmoothSpec>,
    },
}

impl SmoothSpec {
    pub fn build(&self) -> Result<Smooth> {
        Ok(match self {
            SmoothSpec::SquaredResidual { op, target, weight } => Arc::new(SquaredResidual {
                op: op.build()?,
                target: target.clone(),
                weight: *weight,
            }),
            SmoothSpec::Constant { c, dim } => Arc::new(Constant { c: *c, dim: *dim }),
            SmoothSpec::Sum { terms } => Arc::new(Sum {
                terms: terms.iter().map(|t| t.build()).collect::<Result<_>>()?,
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_residual_gradient_matches_differences() {
        let op = Operator::dense(2, 2, vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        let h = SquaredResidual::new(op, Some(vec![0.3, -0.2]), 1.5);
        let x = [0.4, -0.7];
        let g = h.gradient(&x);
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let fd = (h.value(&xp) - h.value(&xm)) / 2e-6;
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0));
        }
    }

    #[test]
    fn sum_adds_values_and_constants() {
        let h = Sum {
            terms: vec![
                Arc::new(SquaredResidual::new(Operator::identity(1), None, 2.0)),
                Arc::new(Constant { c: 1.0, dim: 1 }),
            ],
        };
        assert_eq!(h.value(&[0.0]), 1.0);
        assert_eq!(h.value(&[2.0]), 5.0);
        assert_eq!(h.gradient(&[2.0]), vec![4.0]);
        assert_eq!(h.lipschitz(), 2.0);
    }
}
