//! The fractional program `min_{x∈S} (g(Ax) + h(x) + shift) / f(Kx)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Func, FunctionSpec, QuadraticAugmented};
use crate::linalg;
use crate::operator::{Operator, OperatorSpec};
use crate::set::{BoxSet, Set, SetKind, SetSpec, MEMBERSHIP_TOL};
use crate::smooth::{Smooth, SmoothSpec, SquaredResidual, Sum};

#[derive(Debug, Clone)]
pub struct FractionalProblem {
    pub set: Set,
    pub a: Operator,
    pub k: Operator,
    pub g: Func,
    pub f: Func,
    pub h: Smooth,
    /// Constant added to the numerator.
    pub shift: f64,
    /// Accumulated convexification parameter.
    pub s_cvx: f64,
    pub x_true: Option<Vec<f64>>,
}

impl FractionalProblem {
    pub fn new(set: Set, a: Operator, k: Operator, g: Func, f: Func, h: Smooth) -> Result<Self> {
        let n = set.dim();
        Error::check_dim("A input", n, a.input_dim())?;
        Error::check_dim("K input", n, k.input_dim())?;
        if let Some(d) = g.dim() {
            Error::check_dim("g domain", a.output_dim(), d)?;
        }
        if let Some(d) = f.dim() {
            Error::check_dim("f domain", k.output_dim(), d)?;
        }
        Ok(Self {
            set,
            a,
            k,
            g,
            f,
            h,
            shift: 0.0,
            s_cvx: 0.0,
            x_true: None,
        })
    }

    pub fn with_truth(mut self, x_true: Vec<f64>) -> Self {
        self.x_true = Some(x_true);
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// `h(x) + shift`.
    pub fn h_value(&self, x: &[f64]) -> f64 {
        self.h.value(x) + self.shift
    }

    pub fn numerator(&self, x: &[f64]) -> f64 {
        self.g.value(&self.a.apply(x)) + self.h_value(x)
    }

    pub fn denominator(&self, x: &[f64]) -> f64 {
        self.f.value(&self.k.apply(x))
    }

    /// `F(x)`; a nonpositive denominator is a model violation.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let den = self.denominator(x);
        if !(den > 0.0) {
            return Err(Error::ModelViolation(format!(
                "denominator f(Kx) = {den} is not positive"
            )));
        }
        let num = self.numerator(x);
        if num == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok(num / den)
    }

    /// `F(x)` with infeasible or out-of-model points mapped to `+∞`.
    pub fn objective_or_inf(&self, x: &[f64]) -> f64 {
        if !self.set.contains(x, MEMBERSHIP_TOL) {
            return f64::INFINITY;
        }
        match self.objective(x) {
            Ok(v) if !v.is_nan() => v,
            _ => f64::INFINITY,
        }
    }

    pub fn lipschitz_h(&self) -> f64 {
        self.h.lipschitz()
    }

    /// Replaces `g` by `g + (s/2)‖·‖²` and `h` by `h − (s/2)‖A·‖²`.
    pub fn convexify(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "convexification parameter must be positive, got {s}"
            )));
        }
        let g: Func = Arc::new(QuadraticAugmented {
            inner: self.g.clone(),
            s,
        });
        let h: Smooth = Arc::new(Sum {
            terms: vec![
                self.h.clone(),
                Arc::new(SquaredResidual::new(self.a.clone(), None, -s)),
            ],
        });
        Ok(Self {
            g,
            h,
            s_cvx: self.s_cvx + s,
            ..self.clone()
        })
    }

    /// Adds `c > 0` to the numerator.
    pub fn shift_numerator(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "numerator shift must be positive, got {c}"
            )));
        }
        Ok(Self {
            shift: self.shift + c,
            ..self.clone()
        })
    }

    /// Deterministic sample of feasible points.
    pub fn sample_feasible(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        (0..count)
            .map(|_| match (self.set.kind(), self.set.spec()) {
                (SetKind::Box, Some(SetSpec::Box { lower, upper })) => lower
                    .iter()
                    .zip(&upper)
                    .map(|(&l, &u)| if l == u { l } else { rng.gen_range(l..=u) })
                    .collect(),
                (SetKind::Simplex, _) => {
                    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
                    let s: f64 = e.iter().sum();
                    linalg::scale(&e, 1.0 / s)
                }
                _ => {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    self.set.project(&v)
                }
            })
            .collect()
    }

    /// Checks `f(Kx) > 0` on sampled feasible points.
    pub fn check_denominator(&self, samples: usize, seed: u64) -> Result<()> {
        for x in self.sample_feasible(samples, seed) {
            let d = self.denominator(&x);
            if !(d > 0.0) {
                return Err(Error::ModelViolation(format!(
                    "f(Kx) = {d} at a sampled feasible point"
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        let missing = |what: &str| Error::Unsupported(format!("{what} has no serializable form"));
        Ok(ProblemSpec {
            set: self.set.spec().ok_or_else(|| missing("set"))?,
            a: self.a.spec().ok_or_else(|| missing("A"))?,
            k: self.k.spec().ok_or_else(|| missing("K"))?,
            g: self.g.spec().ok_or_else(|| missing("g"))?,
            f: self.f.spec().ok_or_else(|| missing("f"))?,
            h: self.h.spec().ok_or_else(|| missing("h"))?,
            shift: self.shift,
            s_cvx: self.s_cvx,
            x_true: self.x_true.clone(),
        })
    }
}

/// JSON description of a problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub set: SetSpec,
    pub a: OperatorSpec,
    pub k: OperatorSpec,
    pub g: FunctionSpec,
    pub f: FunctionSpec,
    pub h: SmoothSpec,
    #[serde(default)]
    pub shift: f64,
    /// Recorded only; `g` and `h` are expected to already carry the terms.
    #[serde(default)]
    pub s_cvx: f64,
    #[serde(default)]
    pub x_true: Option<Vec<f64>>,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<FractionalProblem> {
        let mut p = FractionalProblem::new(
            self.set.build()?,
            self.a.build()?,
            self.k.build()?,
            self.g.build(),
            self.f.build(),
            self.h.build()?,
        )?;
        if self.shift < 0.0 {
            return Err(Error::InvalidArgument("shift must be nonnegative".into()));
        }
        p.shift = self.shift;
        p.s_cvx = self.s_cvx;
        p.x_true = self.x_true.clone();
        Ok(p)
    }
}

/// The one-dimensional instance `min_{x∈[−1,1]} (x² + 1)/(|x| + 1)`.
pub fn quadratic_over_abs() -> FractionalProblem {
    use crate::function::{L1Norm, PlusConstant, Zero};
    use crate::smooth::Constant;
    let h: Smooth = Arc::new(Sum {
        terms: vec![
            Arc::new(SquaredResidual::new(Operator::identity(1), None, 2.0)),
            Arc::new(Constant { c: 1.0, dim: 1 }),
        ],
    });
    let f: Func = Arc::new(PlusConstant {
        inner: Arc::new(L1Norm { tau: 1.0 }),
        c: 1.0,
    });
    FractionalProblem::new(
        Arc::new(BoxSet::uniform(1, -1.0, 1.0).expect("valid box")),
        Operator::identity(1),
        Operator::identity(1),
        Arc::new(Zero),
        f,
        h,
    )
    .expect("consistent dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_over_abs_at_zero() {
        let p = quadratic_over_abs();
        assert_eq!(p.objective(&[0.0]).unwrap(), 1.0);
        assert!((p.objective(&[1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_rejects_nonpositive() {
        let p = quadratic_over_abs();
        assert!(p.shift_numerator(0.0).is_err());
        let q = p.shift_numerator(1e-3).unwrap();
        assert!((q.numerator(&[0.0]) - 1.001).abs() < 1e-15);
    }

    #[test]
    fn convexify_preserves_objective() {
        let p = quadratic_over_abs();
        let q = p.convexify(0.5).unwrap();
        for x in p.sample_feasible(50, 3) {
            let a = p.objective(&x).unwrap();
            let b = q.objective(&x).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
        assert!((q.lipschitz_h() - (p.lipschitz_h() + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn spec_round_trip() {
        let p = quadratic_over_abs().convexify(0.1).unwrap();
        let spec = p.spec().unwrap();
        let json = serde_json::to_string_pretty(&spec).unwrap();
        let back: ProblemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let q = back.build().unwrap();
        assert_eq!(q.objective(&[0.3]).unwrap(), p.objective(&[0.3]).unwrap());
    }
}
