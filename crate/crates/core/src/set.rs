//! Compact convex feasible sets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Slack for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

pub trait FeasibleSet: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn project(&self, v: &[f64]) -> Vec<f64>;
    fn contains(&self, x: &[f64], tol: f64) -> bool;
    fn kind(&self) -> SetKind;
    fn spec(&self) -> Option<SetSpec> {
        None
    }
}

pub type Set = Arc<dyn FeasibleSet>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Box,
    Simplex,
    Generic,
}

/// `{x : l ≤ x ≤ u}`; `l = u` gives a singleton.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Error::check_dim("box bounds", lower.len(), upper.len())?;
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidArgument("box needs lower <= upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn singleton(point: Vec<f64>) -> Self {
        Self {
            lower: point.clone(),
            upper: point,
        }
    }
}

impl FeasibleSet for BoxSet {
    fn dim(&self) -> usize {
        self.lower.len()
    }
    fn project(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&l, &u))| x.max(l).min(u))
            .collect()
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&l, &u))| x >= l - tol && x <= u + tol)
    }
    fn kind(&self) -> SetKind {
        SetKind::Box
    }
    fn spec(&self) -> Option<SetSpec> {
        Some(SetSpec::Box {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        })
    }
}

/// Probability simplex `{x ≥ 0 : Σx = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub n: usize,
}

impl FeasibleSet for Simplex {
    fn dim(&self) -> usize {
        self.n
    }
    /// Points already on the simplex up to rounding are returned unchanged,
    /// which makes the projection idempotent bit for bit.
    fn project(&self, v: &[f64]) -> Vec<f64> {
        let slack = 4.0 * f64::EPSILON * (v.len() as f64).max(1.0);
        if v.iter().all(|&x| x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= slack {
            return v.to_vec();
        }
        linalg::project_simplex(v, 1.0)
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n
            && x.iter().all(|&v| v >= -tol)
            && (x.iter().sum::<f64>() - 1.0).abs() <= tol * (self.n as f64).max(1.0)
    }
    fn kind(&self) -> SetKind {
        SetKind::Simplex
    }
    fn spec(&self) -> Option<SetSpec> {
        Some(SetSpec::Simplex { n: self.n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    UniformBox { n: usize, lower: f64, upper: f64 },
    Simplex { n: usize },
}

impl SetSpec {
    pub fn build(&self) -> Result<Set> {
        Ok(match self {
            SetSpec::Box { lower, upper } => Arc::new(BoxSet::new(lower.clone(), upper.clone())?),
            SetSpec::UniformBox { n, lower, upper } => Arc::new(BoxSet::uniform(*n, *lower, *upper)?),
            SetSpec::Simplex { n } => Arc::new(Simplex { n: *n }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_projection_clamps() {
        let b = BoxSet::uniform(2, 0.0, 1.0).unwrap();
        assert_eq!(b.project(&[1.5, -0.2]), vec![1.0, 0.0]);
        assert!(BoxSet::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn simplex_projection_examples() {
        let s = Simplex { n: 2 };
        assert_eq!(s.project(&[0.3, 0.7]), vec![0.3, 0.7]);
        let p = Simplex { n: 3 }.project(&[1.0, 0.5, 0.5]);
        let want = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn singleton_projects_everything_to_its_point() {
        let s = BoxSet::singleton(vec![0.25, 0.5]);
        assert_eq!(s.project(&[9.0, -3.0]), vec![0.25, 0.5]);
    }
}
