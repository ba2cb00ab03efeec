//! Evaluation metrics and the lifted stationarity residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{SubdiffPart, Subdifferential, ACTIVE_TOL};
use crate::linalg;
use crate::problem::FractionalProblem;
use crate::set::{SetKind, SetSpec, MEMBERSHIP_TOL};

/// SSIM window side and stabilising constants.
pub const SSIM_WINDOW: usize = 8;
pub const SSIM_C1: f64 = 0.05;
pub const SSIM_C2: f64 = 0.05;

/// Projected-gradient iterations of the stationarity solve.
pub const STAT_ITERS: usize = 500;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub obj: f64,
    pub infeas: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stat: Option<f64>,
    /// Whether `stat` is only an upper bound.
    #[serde(default)]
    pub stat_upper_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rerr: Option<f64>,
    pub wall_time_s: f64,
    pub iterations: usize,
    pub termination: String,
}

/// `‖u − v‖ / N`.
pub fn rmse(u: &[f64], v: &[f64]) -> Result<f64> {
    Error::check_dim("rmse images", u.len(), v.len())?;
    if u.is_empty() {
        return Err(Error::InvalidArgument("empty images".into()));
    }
    Ok(linalg::dist(u, v) / u.len() as f64)
}

/// Mean local similarity over non-overlapping 8×8 windows of `side × side`
/// row-major images; partial border windows are dropped.
pub fn ssim(u: &[f64], v: &[f64], side: usize) -> Result<f64> {
    Error::check_dim("ssim images", u.len(), v.len())?;
    Error::check_dim("ssim image side", side * side, u.len())?;
    let w = SSIM_WINDOW;
    if side < w {
        return Err(Error::InvalidArgument(format!("images smaller than one {w}x{w} window")));
    }
    let per = side / w;
    let count = (w * w) as f64;
    let mut total = 0.0;
    for br in 0..per {
        for bc in 0..per {
            let idx = |i: usize, j: usize| (br * w + i) * side + bc * w + j;
            let (mut mu, mut mv) = (0.0, 0.0);
            for i in 0..w {
                for j in 0..w {
                    mu += u[idx(i, j)];
                    mv += v[idx(i, j)];
                }
            }
            mu /= count;
            mv /= count;
            let (mut su, mut sv, mut suv) = (0.0, 0.0, 0.0);
            for i in 0..w {
                for j in 0..w {
                    let (a, b) = (u[idx(i, j)] - mu, v[idx(i, j)] - mv);
                    su += a * a;
                    sv += b * b;
                    suv += a * b;
                }
            }
            let norm = count - 1.0;
            let (su, sv, suv) = (su / norm, sv / norm, suv / norm);
            total += ((2.0 * mu * mv + SSIM_C1) * (2.0 * suv + SSIM_C2))
                / ((mu * mu + mv * mv + SSIM_C1) * (su + sv + SSIM_C2));
        }
    }
    Ok(total / (per * per) as f64)
}

/// `‖x − x*‖ / ‖x*‖`.
pub fn rerr(x: &[f64], x_true: &[f64]) -> Result<f64> {
    Error::check_dim("rerr vectors", x_true.len(), x.len())?;
    let n = linalg::norm(x_true);
    if n == 0.0 {
        return Err(Error::InvalidArgument("zero ground truth".into()));
    }
    Ok(linalg::dist(x, x_true) / n)
}

/// `‖max(−x, 0)‖₁ + |‖x‖₁ − 1|`.
pub fn infeas(x: &[f64]) -> f64 {
    let neg: f64 = x.iter().map(|&v| (-v).max(0.0)).sum();
    neg + (linalg::norm1(x) - 1.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatResidual {
    pub value: f64,
    /// Set when a subdifferential had to be replaced by a single selection.
    pub upper_bound: bool,
}

/// `dist(0, (A*∂g(Ax) + ∇h(x) + N_S(x))·f(Kx) − (g(Ax) + h(x))·K*∂f(Kx))`.
///
/// The subdifferentials are parametrised (hull weights, interval and ball
/// coordinates) and the squared distance is minimised over the parameters by
/// accelerated projected gradient; the normal cone is handled in closed form.
pub fn stat_residual(problem: &FractionalProblem, x: &[f64]) -> Result<StatResidual> {
    if !problem.set.contains(x, MEMBERSHIP_TOL) {
        return Err(Error::InvalidArgument("stationarity residual needs x in S".into()));
    }
    let cone = NormalCone::at(problem, x)?;
    let ax = problem.a.apply(x);
    let kx = problem.k.apply(x);
    let den = problem.f.value(&kx);
    let num = problem.g.value(&ax) + problem.h_value(x);
    let mut upper_bound = false;
    let mut describe = |f: &dyn crate::function::ConvexFunction, w: &[f64]| -> Result<Subdifferential> {
        match f.subdifferential(w) {
            Ok(s) => Ok(s),
            Err(Error::Unsupported(_)) => {
                upper_bound = true;
                Ok(Subdifferential::point(f.subgradient(w)?))
            }
            Err(e) => Err(e),
        }
    };
    let sg = describe(problem.g.as_ref(), &ax)?;
    let sf = describe(problem.f.as_ref(), &kx)?;
    let grad_h = problem.h.gradient(x);

    // v(p) = den·(A*G(p) + ∇h) − num·K*D(p); objective ½‖P_T(−v)‖².
    let map = ParamMap {
        problem,
        sg: &sg,
        sf: &sf,
        den,
        num,
        grad_h: &grad_h,
    };
    let mut p = map.initial();
    if p.is_empty() {
        let v = map.v(&p);
        return Ok(StatResidual {
            value: linalg::norm(&cone.tangent_part(&linalg::scale(&v, -1.0))),
            upper_bound,
        });
    }
    let lip = map.lipschitz_estimate().max(1e-300);
    let step = 1.0 / lip;
    let value_at = |p: &[f64]| {
        let v = map.v(p);
        linalg::norm_sq(&cone.tangent_part(&linalg::scale(&v, -1.0)))
    };
    let mut best = value_at(&p);
    let mut best_p = p.clone();
    let mut yk = p.clone();
    let mut t = 1.0f64;
    let mut prev_val = best;
    for _ in 0..STAT_ITERS {
        let v = map.v(&yk);
        let tv = cone.tangent_part(&linalg::scale(&v, -1.0));
        // ∇_v ½‖P_T(−v)‖² = −P_T(−v).
        let gv = linalg::scale(&tv, -1.0);
        let grad = map.adjoint(&gv);
        let mut next = yk.clone();
        linalg::axpy(-step, &grad, &mut next);
        map.project(&mut next);
        let val = value_at(&next);
        if val < best {
            best = val;
            best_p = next.clone();
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if val > prev_val {
            // Adaptive restart.
            t = 1.0;
            yk = next.clone();
        } else {
            let mom = (t - 1.0) / t_next;
            yk = next.iter().zip(&p).map(|(a, b)| a + mom * (a - b)).collect();
            t = t_next;
        }
        p = next;
        prev_val = val;
        if best == 0.0 {
            break;
        }
    }
    let _ = best_p;
    Ok(StatResidual {
        value: best.sqrt(),
        upper_bound,
    })
}

struct ParamMap<'a> {
    problem: &'a FractionalProblem,
    sg: &'a Subdifferential,
    sf: &'a Subdifferential,
    den: f64,
    num: f64,
    grad_h: &'a [f64],
}

fn part_len(part: &SubdiffPart, dim: usize) -> usize {
    match part {
        SubdiffPart::Hull(vs) => vs.len(),
        SubdiffPart::Interval { .. } => 1,
        SubdiffPart::Ball { .. } => dim,
    }
}

fn parts_len(s: &Subdifferential) -> usize {
    s.parts.iter().map(|p| part_len(p, s.dim())).sum()
}

/// Element of the set for parameters `p`.
fn element(s: &Subdifferential, p: &[f64]) -> Vec<f64> {
    let mut out = s.center.clone();
    let mut off = 0;
    for part in &s.parts {
        match part {
            SubdiffPart::Hull(vs) => {
                for (j, vert) in vs.iter().enumerate() {
                    let w = p[off + j];
                    if w != 0.0 {
                        for &(i, val) in vert {
                            out[i] += w * val;
                        }
                    }
                }
            }
            SubdiffPart::Interval { index, .. } => out[*index] += p[off],
            SubdiffPart::Ball { .. } => linalg::axpy(1.0, &p[off..off + s.dim()], &mut out),
        }
        off += part_len(part, s.dim());
    }
    out
}

/// Adjoint of `p ↦ element(s, p) − center`.
fn element_adjoint(s: &Subdifferential, g: &[f64], out: &mut Vec<f64>) {
    for part in &s.parts {
        match part {
            SubdiffPart::Hull(vs) => {
                for vert in vs {
                    out.push(vert.iter().map(|&(i, val)| val * g[i]).sum());
                }
            }
            SubdiffPart::Interval { index, .. } => out.push(g[*index]),
            SubdiffPart::Ball { .. } => out.extend_from_slice(g),
        }
    }
}

fn project_parts(s: &Subdifferential, p: &mut [f64]) {
    let mut off = 0;
    for part in &s.parts {
        let len = part_len(part, s.dim());
        let seg = &mut p[off..off + len];
        match part {
            SubdiffPart::Hull(_) => {
                let proj = linalg::project_simplex(seg, 1.0);
                seg.copy_from_slice(&proj);
            }
            SubdiffPart::Interval { lo, hi, .. } => seg[0] = seg[0].clamp(*lo, *hi),
            SubdiffPart::Ball { radius } => {
                let proj = linalg::project_l2_ball(seg, *radius);
                seg.copy_from_slice(&proj);
            }
        }
        off += len;
    }
}

fn initial_parts(s: &Subdifferential, out: &mut Vec<f64>) {
    for part in &s.parts {
        match part {
            SubdiffPart::Hull(vs) => {
                let w = 1.0 / vs.len().max(1) as f64;
                out.extend(std::iter::repeat_n(w, vs.len()));
            }
            SubdiffPart::Interval { lo, hi, .. } => out.push(0.0f64.clamp(*lo, *hi)),
            SubdiffPart::Ball { .. } => out.extend(std::iter::repeat_n(0.0, s.dim())),
        }
    }
}

impl ParamMap<'_> {
    fn split(&self) -> usize {
        parts_len(self.sg)
    }

    fn initial(&self) -> Vec<f64> {
        let mut p = Vec::new();
        initial_parts(self.sg, &mut p);
        initial_parts(self.sf, &mut p);
        p
    }

    fn project(&self, p: &mut [f64]) {
        let k = self.split();
        let (a, b) = p.split_at_mut(k);
        project_parts(self.sg, a);
        project_parts(self.sf, b);
    }

    fn v(&self, p: &[f64]) -> Vec<f64> {
        let k = self.split();
        let g = element(self.sg, &p[..k]);
        let d = element(self.sf, &p[k..]);
        let mut v = self.problem.a.adjoint(&g);
        linalg::axpy(1.0, self.grad_h, &mut v);
        let mut v = linalg::scale(&v, self.den);
        linalg::axpy(-self.num, &self.problem.k.adjoint(&d), &mut v);
        v
    }

    /// Adjoint of the linear part of `p ↦ v(p)`.
    fn adjoint(&self, gv: &[f64]) -> Vec<f64> {
        let ga = linalg::scale(&self.problem.a.apply(gv), self.den);
        let gk = linalg::scale(&self.problem.k.apply(gv), -self.num);
        let mut out = Vec::new();
        element_adjoint(self.sg, &ga, &mut out);
        element_adjoint(self.sf, &gk, &mut out);
        out
    }

    /// Power iteration on the Gram map of the linear part, padded by 10%.
    fn lipschitz_estimate(&self) -> f64 {
        let n = self.split() + parts_len(self.sf);
        let zero = vec![0.0; n];
        let base = self.v(&zero);
        let mut q: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        let nq = linalg::norm(&q);
        q.iter_mut().for_each(|x| *x /= nq);
        let mut est = 0.0;
        for _ in 0..50 {
            let jv = linalg::sub(&self.v(&q), &base);
            let w = self.adjoint(&jv);
            est = linalg::norm(&w);
            if est == 0.0 {
                break;
            }
            q = linalg::scale(&w, 1.0 / est);
        }
        1.1 * est
    }
}

/// Normal cone of `S` at a point, in a form that supports projection.
enum NormalCone {
    /// Per coordinate: `(may be negative, may be positive)`.
    Box(Vec<(bool, bool)>),
    /// Indices where the simplex point vanishes.
    Simplex(Vec<bool>),
}

impl NormalCone {
    fn at(problem: &FractionalProblem, x: &[f64]) -> Result<Self> {
        match (problem.set.kind(), problem.set.spec()) {
            (SetKind::Box, Some(SetSpec::Box { lower, upper })) => Ok(NormalCone::Box(
                x.iter()
                    .zip(lower.iter().zip(&upper))
                    .map(|(&xi, (&l, &u))| {
                        (xi <= l + MEMBERSHIP_TOL, xi >= u - MEMBERSHIP_TOL)
                    })
                    .collect(),
            )),
            (SetKind::Simplex, _) => Ok(NormalCone::Simplex(
                x.iter().map(|&v| v <= ACTIVE_TOL).collect(),
            )),
            _ => Err(Error::Unsupported(
                "stationarity residual needs a box or simplex feasible set".into(),
            )),
        }
    }

    fn project(&self, w: &[f64]) -> Vec<f64> {
        match self {
            NormalCone::Box(flags) => w
                .iter()
                .zip(flags)
                .map(|(&wi, &(neg, pos))| match (neg, pos) {
                    (true, true) => wi,
                    (true, false) => wi.min(0.0),
                    (false, true) => wi.max(0.0),
                    (false, false) => 0.0,
                })
                .collect(),
            NormalCone::Simplex(zero) => {
                // Cone elements are λe − μ with μ ≥ 0 supported on the zero set.
                let lambda = simplex_normal_level(w, zero);
                w.iter()
                    .zip(zero)
                    .map(|(&wi, &z)| if z { wi.min(lambda) } else { lambda })
                    .collect()
            }
        }
    }

    /// `w − P_N(w)`, the projection onto the polar (tangent) cone.
    fn tangent_part(&self, w: &[f64]) -> Vec<f64> {
        linalg::sub(w, &self.project(w))
    }
}

/// Minimiser over `λ` of `Σ_{free}(w_i − λ)² + Σ_{zero}(w_i − λ)₊²`.
fn simplex_normal_level(w: &[f64], zero: &[bool]) -> f64 {
    let free: Vec<f64> = w.iter().zip(zero).filter(|(_, &z)| !z).map(|(&v, _)| v).collect();
    let mut zs: Vec<f64> = w.iter().zip(zero).filter(|(_, &z)| z).map(|(&v, _)| v).collect();
    zs.sort_by(|a, b| b.total_cmp(a));
    if free.is_empty() {
        // Every coordinate is zero (not a simplex point); any level works.
        return zs.first().copied().unwrap_or(0.0);
    }
    let mut sum: f64 = free.iter().sum();
    let mut count = free.len() as f64;
    let mut lambda = sum / count;
    for &zv in &zs {
        if zv > lambda {
            sum += zv;
            count += 1.0;
            lambda = sum / count;
        } else {
            break;
        }
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[1.0; 4], &[0.0; 4]).unwrap(), 0.5);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ssim_identity_and_constants() {
        let u: Vec<f64> = (0..64).map(|i| (i % 5) as f64 * 0.1).collect();
        assert_eq!(ssim(&u, &u, 8).unwrap(), 1.0);
        let (a, b) = (0.2, 0.6);
        let s = ssim(&[a; 64], &[b; 64], 8).unwrap();
        let want = (2.0 * a * b + 0.05) / (a * a + b * b + 0.05);
        assert!((s - want).abs() < 1e-12);
        assert!(ssim(&[0.0; 49], &[0.0; 49], 7).is_err());
    }

    #[test]
    fn rerr_and_infeas_examples() {
        assert_eq!(rerr(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert!((rerr(&[0.2, 1.0], &[1.0, 0.0]).unwrap() - 1.2806248474865698).abs() < 1e-15);
        assert!(rerr(&[1.0], &[0.0]).is_err());
        assert_eq!(infeas(&[0.5, 0.5]), 0.0);
        assert!((infeas(&[-0.1, 1.2]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn simplex_normal_level_examples() {
        // No zeros: λ is the mean.
        assert_eq!(simplex_normal_level(&[1.0, 3.0], &[false, false]), 2.0);
        // A zero coordinate with a large entry joins the average.
        assert_eq!(simplex_normal_level(&[1.0, 3.0], &[false, true]), 2.0);
        assert_eq!(simplex_normal_level(&[1.0, -3.0], &[false, true]), 1.0);
    }

    #[test]
    fn stat_zero_at_known_point() {
        let p = crate::problem::quadratic_over_abs();
        let s = stat_residual(&p, &[0.0]).unwrap();
        assert!(s.value <= 1e-12, "{}", s.value);
        assert!(!s.upper_bound);
    }
}
