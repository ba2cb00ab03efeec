//! Convex function oracles for the nonsmooth parts `g` and `f`.
//!
//! Every oracle exposes its value, conjugate value, proximal map, a
//! deterministic subgradient selection and a parametric description of the
//! full subdifferential (used by the stationarity residual). The conjugate
//! prox defaults to the extended Moreau identity
//! `prox_{g*,κ}(v) = v − κ·prox_{g,1/κ}(v/κ)`; oracles with a cheaper closed
//! form override it.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Absolute slack used when testing membership in the domain of an
/// indicator-valued conjugate.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Relative tolerance for "attains the max" when describing subdifferentials.
pub const ACTIVE_TOL: f64 = 1e-8;

pub trait ConvexFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> Option<usize> {
        None
    }

    fn value(&self, x: &[f64]) -> f64;

    /// Fenchel conjugate `sup_x ⟨v,x⟩ − f(x)`; `+∞` outside its domain.
    fn conjugate(&self, v: &[f64]) -> f64;

    /// `argmin_y f(y) + ‖y − v‖²/(2κ)`.
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>>;

    /// Prox of the conjugate with modulus `κ`.
    fn prox_conjugate(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        let inner = self.prox(&linalg::scale(v, 1.0 / kappa), 1.0 / kappa)?;
        Ok(v.iter().zip(&inner).map(|(vi, pi)| vi - kappa * pi).collect())
    }

    /// One subgradient, chosen deterministically.
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// The whole subdifferential in parametric form.
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        let _ = x;
        Err(Error::Unsupported(format!(
            "no subdifferential description for {self:?}"
        )))
    }

    /// Bound on the selected subgradients over the relevant compact set.
    fn subgradient_bound(&self) -> Option<f64> {
        None
    }

    fn spec(&self) -> Option<FunctionSpec> {
        None
    }
}

/// Shared handle to a convex oracle.
pub type Func = Arc<dyn ConvexFunction>;

/// A convex subset of ℝᵈ written as `center + Σ parts`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdifferential {
    pub center: Vec<f64>,
    pub parts: Vec<SubdiffPart>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubdiffPart {
    /// Convex hull of the listed sparse vertices `[(index, value)]`.
    Hull(Vec<Vec<(usize, f64)>>),
    /// `t·e_index` with `t ∈ [lo, hi]`.
    Interval { index: usize, lo: f64, hi: f64 },
    /// Euclidean ball of the given radius over all coordinates.
    Ball { radius: f64 },
}

impl Subdifferential {
    pub fn point(v: Vec<f64>) -> Self {
        Self {
            center: v,
            parts: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `−S`.
    pub fn negated(mut self) -> Self {
        self.center.iter_mut().for_each(|c| *c = -*c);
        for part in &mut self.parts {
            match part {
                SubdiffPart::Hull(vs) => {
                    for v in vs {
                        v.iter_mut().for_each(|(_, x)| *x = -*x);
                    }
                }
                SubdiffPart::Interval { lo, hi, .. } => {
                    let (l, h) = (-*hi, -*lo);
                    *lo = l;
                    *hi = h;
                }
                SubdiffPart::Ball { .. } => {}
            }
        }
        self
    }

    pub fn translated(mut self, shift: &[f64]) -> Self {
        linalg::axpy(1.0, shift, &mut self.center);
        self
    }

    /// Whether `v` lies in the set, checked exactly for point sets and by a
    /// sufficient test otherwise (used in tests).
    pub fn is_singleton(&self) -> bool {
        self.parts.is_empty()
    }
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Identically zero.
#[derive(Debug, Clone, Default)]
pub struct Zero;

impl ConvexFunction for Zero {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        if linalg::norm_inf(v) <= MEMBERSHIP_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Ok(v.to_vec())
    }
    fn prox_conjugate(&self, v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Ok(vec![0.0; v.len()])
    }
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; x.len()])
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        Ok(Subdifferential::point(vec![0.0; x.len()]))
    }
    fn subgradient_bound(&self) -> Option<f64> {
        Some(0.0)
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::Zero)
    }
}

/// `τ‖x‖₁`. Its conjugate is the indicator of the ∞-ball of radius `τ`.
#[derive(Debug, Clone)]
pub struct L1Norm {
    pub tau: f64,
}

impl ConvexFunction for L1Norm {
    fn value(&self, x: &[f64]) -> f64 {
        self.tau * linalg::norm1(x)
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        if linalg::norm_inf(v) <= self.tau + MEMBERSHIP_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        Ok(v.iter().map(|&x| soft_threshold(x, kappa * self.tau)).collect())
    }
    fn prox_conjugate(&self, v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Ok(v.iter().map(|&x| x.clamp(-self.tau, self.tau)).collect())
    }
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|&xi| self.tau * sign0(xi)).collect())
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        let scale = linalg::norm_inf(x).max(1.0);
        let mut center = vec![0.0; x.len()];
        let mut parts = Vec::new();
        for (i, &xi) in x.iter().enumerate() {
            if xi.abs() <= ACTIVE_TOL * scale {
                parts.push(SubdiffPart::Interval {
                    index: i,
                    lo: -self.tau,
                    hi: self.tau,
                });
            } else {
                center[i] = self.tau * xi.signum();
            }
        }
        Ok(Subdifferential { center, parts })
    }
    fn subgradient_bound(&self) -> Option<f64> {
        None
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::L1 { tau: self.tau })
    }
}

/// `‖x‖_∞`. Its conjugate is the indicator of the unit ℓ1 ball.
#[derive(Debug, Clone, Default)]
pub struct LInfNorm;

impl ConvexFunction for LInfNorm {
    fn value(&self, x: &[f64]) -> f64 {
        linalg::norm_inf(x)
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        if linalg::norm1(v) <= 1.0 + MEMBERSHIP_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        let p = linalg::project_l1_ball(&linalg::scale(v, 1.0 / kappa), 1.0);
        Ok(v.iter().zip(&p).map(|(vi, pi)| vi - kappa * pi).collect())
    }
    fn prox_conjugate(&self, v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Ok(linalg::project_l1_ball(v, 1.0))
    }
    /// `sign(x_i)·e_i` for the lowest index attaining the max; 0 at the origin.
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; x.len()];
        let m = linalg::norm_inf(x);
        if m > 0.0 {
            let i = x.iter().position(|v| v.abs() == m).unwrap_or(0);
            g[i] = x[i].signum();
        }
        Ok(g)
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        let m = linalg::norm_inf(x);
        let mut vertices = Vec::new();
        if m == 0.0 {
            for i in 0..x.len() {
                vertices.push(vec![(i, 1.0)]);
                vertices.push(vec![(i, -1.0)]);
            }
        } else {
            let cut = m - ACTIVE_TOL * m.max(1.0);
            for (i, &xi) in x.iter().enumerate() {
                if xi.abs() >= cut {
                    vertices.push(vec![(i, xi.signum())]);
                }
            }
        }
        Ok(Subdifferential {
            center: vec![0.0; x.len()],
            parts: vec![SubdiffPart::Hull(vertices)],
        })
    }
    fn subgradient_bound(&self) -> Option<f64> {
        Some(1.0)
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::LInf)
    }
}

/// Euclidean norm `‖x‖₂`. Its conjugate is the indicator of the unit ball.
#[derive(Debug, Clone, Default)]
pub struct L2Norm;

impl ConvexFunction for L2Norm {
    fn value(&self, x: &[f64]) -> f64 {
        linalg::norm(x)
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        if linalg::norm(v) <= 1.0 + MEMBERSHIP_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        let n = linalg::norm(v);
        if n <= kappa {
            Ok(vec![0.0; v.len()])
        } else {
            Ok(linalg::scale(v, 1.0 - kappa / n))
        }
    }
    fn prox_conjugate(&self, v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Ok(linalg::project_l2_ball(v, 1.0))
    }
    /// Gradient away from the origin, 0 at the kink.
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = linalg::norm(x);
        if n == 0.0 {
            Ok(vec![0.0; x.len()])
        } else {
            Ok(linalg::scale(x, 1.0 / n))
        }
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        let n = linalg::norm(x);
        if n == 0.0 {
            Ok(Subdifferential {
                center: vec![0.0; x.len()],
                parts: vec![SubdiffPart::Ball { radius: 1.0 }],
            })
        } else {
            Ok(Subdifferential::point(linalg::scale(x, 1.0 / n)))
        }
    }
    fn subgradient_bound(&self) -> Option<f64> {
        Some(1.0)
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::L2)
    }
}

/// Affine `⟨a, x⟩ + c`.
#[derive(Debug, Clone)]
pub struct Affine {
    pub a: Vec<f64>,
    pub c: f64,
}

impl ConvexFunction for Affine {
    fn dim(&self) -> Option<usize> {
        Some(self.a.len())
    }
    fn value(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.a, x) + self.c
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        if linalg::dist(v, &self.a) <= MEMBERSHIP_TOL {
            -self.c
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        Ok(v.iter().zip(&self.a).map(|(vi, ai)| vi - kappa * ai).collect())
    }
    fn prox_conjugate(&self, _v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Ok(self.a.clone())
    }
    fn subgradient(&self, _x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.a.clone())
    }
    fn subdifferential(&self, _x: &[f64]) -> Result<Subdifferential> {
        Ok(Subdifferential::point(self.a.clone()))
    }
    fn subgradient_bound(&self) -> Option<f64> {
        Some(linalg::norm(&self.a))
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::Affine {
            a: self.a.clone(),
            c: self.c,
        })
    }
}

/// `φ(x) + c`.
#[derive(Debug, Clone)]
pub struct PlusConstant {
    pub inner: Func,
    pub c: f64,
}

impl ConvexFunction for PlusConstant {
    fn dim(&self) -> Option<usize> {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x) + self.c
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        self.inner.conjugate(v) - self.c
    }
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        self.inner.prox(v, kappa)
    }
    fn prox_conjugate(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        self.inner.prox_conjugate(v, kappa)
    }
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inner.subgradient(x)
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        self.inner.subdifferential(x)
    }
    fn subgradient_bound(&self) -> Option<f64> {
        self.inner.subgradient_bound()
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::PlusConstant {
            inner: Box::new(self.inner.spec()?),
            c: self.c,
        })
    }
}

/// `φ(r − x)`.
#[derive(Debug, Clone)]
pub struct Reflected {
    pub inner: Func,
    pub r: Vec<f64>,
}

impl ConvexFunction for Reflected {
    fn dim(&self) -> Option<usize> {
        Some(self.r.len())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&linalg::sub(&self.r, x))
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        linalg::dot(v, &self.r) + self.inner.conjugate(&linalg::scale(v, -1.0))
    }
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        let p = self.inner.prox(&linalg::sub(&self.r, v), kappa)?;
        Ok(linalg::sub(&self.r, &p))
    }
    /// With `p = −z`, the conjugate prox reduces to `−prox_{φ*,κ}(κr − v)`.
    fn prox_conjugate(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        let arg: Vec<f64> = self.r.iter().zip(v).map(|(ri, vi)| kappa * ri - vi).collect();
        let p = self.inner.prox_conjugate(&arg, kappa)?;
        Ok(linalg::scale(&p, -1.0))
    }
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.inner.subgradient(&linalg::sub(&self.r, x))?;
        Ok(linalg::scale(&g, -1.0))
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        Ok(self.inner.subdifferential(&linalg::sub(&self.r, x))?.negated())
    }
    fn subgradient_bound(&self) -> Option<f64> {
        self.inner.subgradient_bound()
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::Reflected {
            inner: Box::new(self.inner.spec()?),
            r: self.r.clone(),
        })
    }
}

/// `φ(x) + (s/2)‖x‖²`, strongly convex for `s > 0`.
#[derive(Debug, Clone)]
pub struct QuadraticAugmented {
    pub inner: Func,
    pub s: f64,
}

impl ConvexFunction for QuadraticAugmented {
    fn dim(&self) -> Option<usize> {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x) + 0.5 * self.s * linalg::norm_sq(x)
    }
    /// Infimal convolution of `φ*` with `‖·‖²/(2s)`, evaluated at its minimiser
    /// `u = prox_{φ*,s}(v)`.
    fn conjugate(&self, v: &[f64]) -> f64 {
        if self.s == 0.0 {
            return self.inner.conjugate(v);
        }
        match self.inner.prox_conjugate(v, self.s) {
            Ok(u) => self.inner.conjugate(&u) + linalg::dist(v, &u).powi(2) / (2.0 * self.s),
            Err(_) => f64::NAN,
        }
    }
    /// Completing the square: `prox_{φ, κ/(1+κs)}(v/(1+κs))`.
    fn prox(&self, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
        let d = 1.0 + kappa * self.s;
        self.inner.prox(&linalg::scale(v, 1.0 / d), kappa / d)
    }
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.inner.subgradient(x)?;
        linalg::axpy(self.s, x, &mut g);
        Ok(g)
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        Ok(self
            .inner
            .subdifferential(x)?
            .translated(&linalg::scale(x, self.s)))
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::QuadraticAugmented {
            inner: Box::new(self.inner.spec()?),
            s: self.s,
        })
    }
}

/// `max_i ‖x_i‖²` over `blocks` consecutive blocks of length `block_len`.
///
/// Conjugate: `(Σ_i ‖y_i‖)²/4`.
#[derive(Debug, Clone)]
pub struct MaxBlockSquares {
    pub blocks: usize,
    pub block_len: usize,
}

impl MaxBlockSquares {
    fn block<'a>(&self, x: &'a [f64], i: usize) -> &'a [f64] {
        &x[i * self.block_len..(i + 1) * self.block_len]
    }

    fn block_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.blocks).map(|i| linalg::norm_sq(self.block(x, i))).collect()
    }
}

impl ConvexFunction for MaxBlockSquares {
    fn dim(&self) -> Option<usize> {
        Some(self.blocks * self.block_len)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.block_values(x).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
    fn conjugate(&self, v: &[f64]) -> f64 {
        let s: f64 = (0..self.blocks).map(|i| linalg::norm(self.block(v, i))).sum();
        0.25 * s * s
    }
    fn prox(&self, _v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Err(Error::Unsupported(
            "max-of-block-squares has no registered prox rule".into(),
        ))
    }
    /// `2x_i` on the lowest-index block attaining the max, zero elsewhere.
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim("max-block-squares input", self.blocks * self.block_len, x.len())?;
        let vals = self.block_values(x);
        let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let i = vals.iter().position(|&v| v == m).unwrap_or(0);
        let mut g = vec![0.0; x.len()];
        let off = i * self.block_len;
        for j in 0..self.block_len {
            g[off + j] = 2.0 * x[off + j];
        }
        Ok(g)
    }
    fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        let vals = self.block_values(x);
        let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cut = m - ACTIVE_TOL * m.abs().max(1.0);
        let vertices = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= cut)
            .map(|(i, _)| {
                let off = i * self.block_len;
                (0..self.block_len).map(|j| (off + j, 2.0 * x[off + j])).collect()
            })
            .collect();
        Ok(Subdifferential {
            center: vec![0.0; x.len()],
            parts: vec![SubdiffPart::Hull(vertices)],
        })
    }
    fn spec(&self) -> Option<FunctionSpec> {
        Some(FunctionSpec::MaxBlockSquares {
            blocks: self.blocks,
            block_len: self.block_len,
        })
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type SubgradientFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Value-only oracle with caller-supplied closures and no prox rule.
pub struct Generic {
    pub name: String,
    pub value: ValueFn,
    pub subgradient: SubgradientFn,
}

impl fmt::Debug for Generic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generic").field("name", &self.name).finish()
    }
}

impl ConvexFunction for Generic {
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn conjugate(&self, _v: &[f64]) -> f64 {
        f64::NAN
    }
    fn prox(&self, _v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Err(Error::Unsupported(format!("{} has no prox rule", self.name)))
    }
    fn prox_conjugate(&self, _v: &[f64], _kappa: f64) -> Result<Vec<f64>> {
        Err(Error::Unsupported(format!("{} has no prox rule", self.name)))
    }
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok((self.subgradient)(x))
    }
}

/// Serializable description of a convex oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Zero,
    L1 { tau: f64 },
    LInf,
    L2,
    Affine { a: Vec<f64>, c: f64 },
    PlusConstant { inner: Box<FunctionSpec>, c: f64 },
    Reflected { inner: Box<FunctionSpec>, r: Vec<f64> },
    QuadraticAugmented { inner: Box<FunctionSpec>, s: f64 },
    MaxBlockSquares { blocks: usize, block_len: usize },
}

impl FunctionSpec {
    pub fn build(&self) -> Func {
        match self {
            FunctionSpec::Zero => Arc::new(Zero),
            FunctionSpec::L1 { tau } => Arc::new(L1Norm { tau: *tau }),
            FunctionSpec::LInf => Arc::new(LInfNorm),
            FunctionSpec::L2 => Arc::new(L2Norm),
            FunctionSpec::Affine { a, c } => Arc::new(Affine { a: a.clone(), c: *c }),
            FunctionSpec::PlusConstant { inner, c } => Arc::new(PlusConstant {
                inner: inner.build(),
                c: *c,
            }),
            FunctionSpec::Reflected { inner, r } => Arc::new(Reflected {
                inner: inner.build(),
                r: r.clone(),
            }),
            FunctionSpec::QuadraticAugmented { inner, s } => Arc::new(QuadraticAugmented {
                inner: inner.build(),
                s: *s,
            }),
            FunctionSpec::MaxBlockSquares { blocks, block_len } => Arc::new(MaxBlockSquares {
                blocks: *blocks,
                block_len: *block_len,
            }),
        }
    }
}

/// Proximal map of `f` with modulus `κ > 0`.
pub fn prox(f: &dyn ConvexFunction, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
    check_modulus(v, kappa)?;
    f.prox(v, kappa)
}

/// Proximal map of `f*` with modulus `κ > 0`.
pub fn prox_conjugate(f: &dyn ConvexFunction, v: &[f64], kappa: f64) -> Result<Vec<f64>> {
    check_modulus(v, kappa)?;
    f.prox_conjugate(v, kappa)
}

/// One subgradient of `f` at `w`; fails outside `dom f`.
pub fn subgradient(f: &dyn ConvexFunction, w: &[f64]) -> Result<Vec<f64>> {
    if !f.value(w).is_finite() {
        return Err(Error::Domain("subgradient requested outside dom f".into()));
    }
    f.subgradient(w)
}

fn check_modulus(v: &[f64], kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("prox modulus must be positive, got {kappa}")));
    }
    if !linalg::is_finite(v) {
        return Err(Error::InvalidArgument("prox argument is not finite".into()));
    }
    Ok(())
}
