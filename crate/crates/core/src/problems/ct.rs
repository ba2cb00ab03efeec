//! Limited-angle parallel-beam tomography at desk scale.
//!
//! Images are `n × n`, row-major with row 0 at the top, unit pixels centred
//! on the origin. Pixel `(r, c)` covers `x ∈ [c − n/2, c + 1 − n/2]`,
//! `y ∈ [n/2 − r − 1, n/2 − r]`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::function::{L1Norm, L2Norm};
use crate::operator::{Csr, LinearOperator, Operator, OperatorSpec};
use crate::problem::FractionalProblem;
use crate::set::BoxSet;
use crate::smooth::SquaredResidual;

pub const TAU: f64 = 0.1;
pub const S_CVX: f64 = 0.1;

/// Forward differences with a zero last difference (Neumann boundary).
/// Output is the horizontal block followed by the vertical block.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub side: usize,
}

impl LinearOperator for Gradient {
    fn input_dim(&self) -> usize {
        self.side * self.side
    }
    fn output_dim(&self) -> usize {
        2 * self.side * self.side
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.side;
        let (gx, gy) = out.split_at_mut(n * n);
        for r in 0..n {
            for c in 0..n {
                let i = r * n + c;
                gx[i] = if c + 1 < n { x[i + 1] - x[i] } else { 0.0 };
                gy[i] = if r + 1 < n { x[i + n] - x[i] } else { 0.0 };
            }
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let n = self.side;
        let (gx, gy) = y.split_at(n * n);
        out.fill(0.0);
        for r in 0..n {
            for c in 0..n {
                let i = r * n + c;
                if c + 1 < n {
                    out[i + 1] += gx[i];
                    out[i] -= gx[i];
                }
                if r + 1 < n {
                    out[i + n] += gy[i];
                    out[i] -= gy[i];
                }
            }
        }
    }
    fn spec(&self) -> Option<OperatorSpec> {
        Some(OperatorSpec::Gradient { side: self.side })
    }
}

pub fn discrete_gradient(side: usize) -> Result<Operator> {
    if side < 2 {
        return Err(Error::InvalidArgument(format!("gradient needs side >= 2, got {side}")));
    }
    Ok(Operator::new(Gradient { side }))
}

/// Detector count used when none is given: `⌈n√2⌉ + 4`.
pub fn default_detectors(side: usize) -> usize {
    (side as f64 * std::f64::consts::SQRT_2).ceil() as usize + 4
}

/// One angle per degree over `[0°, range)`.
pub fn angles_for_range(range_deg: f64) -> Vec<f64> {
    (0..range_deg.round() as usize).map(|a| a as f64).collect()
}

/// Exact intersection lengths of every ray with every pixel. Row index is
/// `angle_index · detectors + detector`; detector `j` sits at offset
/// `j − (D − 1)/2` along `(cos θ, sin θ)` and the ray runs along `(−sin θ, cos θ)`.
pub fn parallel_beam_matrix(side: usize, angles_deg: &[f64], detectors: usize) -> Result<Csr> {
    if side < 8 {
        return Err(Error::InvalidArgument(format!("projector needs side >= 8, got {side}")));
    }
    if angles_deg.is_empty() {
        return Err(Error::InvalidArgument("projector needs at least one angle".into()));
    }
    if detectors == 0 {
        return Err(Error::InvalidArgument("projector needs at least one detector".into()));
    }
    let half = side as f64 / 2.0;
    let mut rows = Vec::with_capacity(angles_deg.len() * detectors);
    for &deg in angles_deg {
        let th = deg.to_radians();
        let (e, u) = ((th.cos(), th.sin()), (-th.sin(), th.cos()));
        for j in 0..detectors {
            let t = j as f64 - (detectors as f64 - 1.0) / 2.0;
            rows.push(trace_ray(side, half, (t * e.0, t * e.1), u));
        }
    }
    Ok(Csr::from_rows(side * side, rows).with_spec(OperatorSpec::ParallelBeam {
        side,
        angles_deg: angles_deg.to_vec(),
        detectors,
    }))
}

pub fn parallel_beam_projector(side: usize, angles_deg: &[f64], detectors: usize) -> Result<Operator> {
    Ok(Operator::new(parallel_beam_matrix(side, angles_deg, detectors)?))
}

const AXIS_EPS: f64 = 1e-12;

fn trace_ray(side: usize, half: f64, p: (f64, f64), u: (f64, f64)) -> Vec<(usize, f64)> {
    // Parameter interval inside the square [−half, half]².
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (pc, uc) in [(p.0, u.0), (p.1, u.1)] {
        if uc.abs() < AXIS_EPS {
            if pc < -half || pc > half {
                return Vec::new();
            }
        } else {
            let a = (-half - pc) / uc;
            let b = (half - pc) / uc;
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    if !(hi > lo) {
        return Vec::new();
    }
    let mut cuts = vec![lo, hi];
    for (pc, uc) in [(p.0, u.0), (p.1, u.1)] {
        if uc.abs() >= AXIS_EPS {
            for i in 0..=side {
                let s = (i as f64 - half - pc) / uc;
                if s > lo && s < hi {
                    cuts.push(s);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut out: Vec<(usize, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 1e-12 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let x = p.0 + mid * u.0;
        let y = p.1 + mid * u.1;
        let c = (x + half).floor();
        let rb = (y + half).floor();
        if c < 0.0 || rb < 0.0 || c >= side as f64 || rb >= side as f64 {
            continue;
        }
        let r = side - 1 - rb as usize;
        let idx = r * side + c as usize;
        match out.last_mut() {
            Some((last, v)) if *last == idx => *v += len,
            _ => out.push((idx, len)),
        }
    }
    out
}

/// Ellipses `(intensity, a, b, x0, y0, angle°)` of the modified phantom.
const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Ten-ellipse head phantom sampled at pixel centres, clamped to `[0, 1]`.
pub fn shepp_logan(side: usize) -> Vec<f64> {
    let n = side as f64;
    let mut img = vec![0.0; side * side];
    for r in 0..side {
        let y = 1.0 - (r as f64 + 0.5) * 2.0 / n;
        for c in 0..side {
            let x = (c as f64 + 0.5) * 2.0 / n - 1.0;
            let mut v = 0.0;
            for &(amp, a, b, x0, y0, deg) in &ELLIPSES {
                let (s, co) = deg.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let xr = dx * co + dy * s;
                let yr = -dx * s + dy * co;
                if (xr / a).powi(2) + (yr / b).powi(2) <= 1.0 {
                    v += amp;
                }
            }
            img[r * side + c] = v.clamp(0.0, 1.0);
        }
    }
    img
}

#[derive(Debug, Clone)]
pub struct CtInstance {
    pub side: usize,
    pub range_deg: f64,
    pub angles_deg: Vec<f64>,
    pub detectors: usize,
    pub projector: Arc<Csr>,
    pub measurements: Vec<f64>,
    pub sigma: f64,
    pub lower: f64,
    pub upper: f64,
    pub phantom: Vec<f64>,
    /// `g = τ‖·‖₁`, `f = ‖·‖`, `A = K = ∇`, `h = ½‖Px − f‖²` on `[0,1]^{n²}`,
    /// convexified with `s = 0.1`.
    pub problem: FractionalProblem,
}

pub fn make_ct_problem(side: usize, range_deg: f64, sigma: f64, seed: u64) -> Result<CtInstance> {
    make_ct_problem_with(side, range_deg, default_detectors(side), sigma, seed)
}

pub fn make_ct_problem_with(
    side: usize,
    range_deg: f64,
    detectors: usize,
    sigma: f64,
    seed: u64,
) -> Result<CtInstance> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise level must be >= 0, got {sigma}")));
    }
    if !(range_deg >= 1.0) {
        return Err(Error::InvalidArgument(format!("angular range must be >= 1 degree, got {range_deg}")));
    }
    let angles = angles_for_range(range_deg);
    let csr = Arc::new(parallel_beam_matrix(side, &angles, detectors)?);
    let p = Operator::from_arc(csr.clone());
    let phantom = shepp_logan(side);
    let mut measurements = p.apply(&phantom);
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        measurements.iter_mut().for_each(|m| *m += noise.sample(&mut rng));
    }
    let grad = discrete_gradient(side)?;
    let problem = FractionalProblem::new(
        Arc::new(BoxSet::uniform(side * side, 0.0, 1.0)?),
        grad.clone(),
        grad,
        Arc::new(L1Norm { tau: TAU }),
        Arc::new(L2Norm),
        Arc::new(SquaredResidual::new(p, Some(measurements.clone()), 1.0)),
    )?
    .with_truth(phantom.clone())
    .convexify(S_CVX)?;
    Ok(CtInstance {
        side,
        range_deg,
        angles_deg: angles,
        detectors,
        projector: csr,
        measurements,
        sigma,
        lower: 0.0,
        upper: 1.0,
        phantom,
        problem,
    })
}
