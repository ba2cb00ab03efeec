//! The full-splitting proximal-subgradient family.
//!
//! [`conceptual`] runs the basic update with caller-supplied `γ_k`, `δ_k`
//! schedules; [`adaptive`] chooses them itself and keeps `θ_k > 0`;
//! [`nls`] replaces the fixed `δ_k` with a nonmonotone line search.

pub mod adaptive;
pub mod conceptual;
pub mod nls;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function;
use crate::linalg;
use crate::problem::FractionalProblem;
use crate::set::MEMBERSHIP_TOL;

/// Floor applied to `θ₀ = F(x⁰)` when no initial ratio is given.
pub const THETA_FLOOR: f64 = 1e-8;

/// Relative-change criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// `‖x^{k+1} − x^k‖ / max(eps, ‖x^k‖) ≤ tol`.
    #[default]
    RelativePrevious,
    /// `‖x^{k+1} − x^k‖ / max(‖x^{k+1}‖, eps) ≤ tol`.
    RelativeNext,
    /// `‖x^{k+1} − x*‖ / ‖x*‖ < tol`; needs a ground truth.
    RelativeError,
}

/// Per-stage overrides of [`FspsConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageOverride {
    pub beta: Option<f64>,
    pub nu: Option<f64>,
    pub q: Option<f64>,
    pub epsilon: Option<f64>,
    pub mu: Option<f64>,
    pub eta: Option<f64>,
    pub c: Option<f64>,
    pub memory: Option<usize>,
    pub ls_budget: Option<usize>,
    pub gamma_budget: Option<usize>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub delta0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FspsConfig {
    /// Extrapolation parameter in `(0, 2)`.
    pub beta: f64,
    pub nu: f64,
    /// γ shrink factor in `(0, 1)`.
    pub q: f64,
    /// Initial `δ`; defaults to `2ν + L + 2‖A‖²/γ₀`.
    pub delta0: Option<f64>,
    /// Initial ratio; defaults to `max(F(x⁰), 1e-8)`.
    pub theta0: Option<f64>,
    pub gamma0: f64,
    /// Threshold of the z-norm guard.
    pub epsilon: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub stop_rule: StopRule,
    /// γ-backtracking budget `ℓ`.
    pub gamma_budget: usize,
    pub mu: f64,
    pub eta: f64,
    pub c: f64,
    /// Nonmonotone memory `T`.
    pub memory: usize,
    /// Line-search trial budget `t`.
    pub ls_budget: usize,
    pub stages: Vec<StageOverride>,
    /// Fill the `time_s` trace column with wall-clock time.
    pub record_time: bool,
}

impl Default for FspsConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            nu: 1.0,
            q: 0.5,
            delta0: None,
            theta0: None,
            gamma0: 1.0,
            epsilon: 1.0,
            max_iter: 1000,
            tol: 1e-6,
            stop_rule: StopRule::RelativePrevious,
            gamma_budget: 1000,
            mu: 0.4,
            eta: 1.2,
            c: 1e-4,
            memory: 5,
            ls_budget: 250,
            stages: Vec::new(),
            record_time: false,
        }
    }
}

impl FspsConfig {
    /// All range violations, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                out.push(msg);
            }
        };
        check(self.beta > 0.0 && self.beta < 2.0, format!("beta = {} must lie in (0, 2)", self.beta));
        check(self.nu > 0.0, format!("nu = {} must be positive", self.nu));
        check(self.q > 0.0 && self.q < 1.0, format!("q = {} must lie in (0, 1)", self.q));
        check(self.gamma0 > 0.0, format!("gamma0 = {} must be positive", self.gamma0));
        check(self.epsilon > 0.0, format!("epsilon = {} must be positive", self.epsilon));
        check(self.tol > 0.0, format!("tol = {} must be positive", self.tol));
        check(self.mu > 0.0 && self.mu < 1.0, format!("mu = {} must lie in (0, 1)", self.mu));
        check(self.eta > 1.0, format!("eta = {} must be greater than 1", self.eta));
        check(self.c > 0.0, format!("c = {} must be positive", self.c));
        check(self.gamma_budget >= 1, "gamma_budget must be at least 1".into());
        check(self.ls_budget >= 1, "ls_budget must be at least 1".into());
        if let Some(d) = self.delta0 {
            check(d > 0.0, format!("delta0 = {d} must be positive"));
        }
        if let Some(t) = self.theta0 {
            check(t > 0.0, format!("theta0 = {t} must be positive"));
        }
        for (i, stage) in self.stages.iter().enumerate() {
            for v in self.with_stage(stage).violations() {
                out.push(format!("stage {}: {v}", i + 1));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(v.join("; ")))
        }
    }

    /// This configuration with a stage's overrides applied (and no stages).
    pub fn with_stage(&self, s: &StageOverride) -> Self {
        Self {
            beta: s.beta.unwrap_or(self.beta),
            nu: s.nu.unwrap_or(self.nu),
            q: s.q.unwrap_or(self.q),
            epsilon: s.epsilon.unwrap_or(self.epsilon),
            mu: s.mu.unwrap_or(self.mu),
            eta: s.eta.unwrap_or(self.eta),
            c: s.c.unwrap_or(self.c),
            memory: s.memory.unwrap_or(self.memory),
            ls_budget: s.ls_budget.unwrap_or(self.ls_budget),
            gamma_budget: s.gamma_budget.unwrap_or(self.gamma_budget),
            max_iter: s.max_iter.unwrap_or(self.max_iter),
            tol: s.tol.unwrap_or(self.tol),
            delta0: s.delta0.or(self.delta0),
            stages: Vec::new(),
            ..self.clone()
        }
    }

    /// `2ν + L + 2‖A‖²/γ`.
    pub fn standard_delta(&self, problem: &FractionalProblem, gamma: f64) -> f64 {
        2.0 * self.nu + problem.lipschitz_h() + 2.0 * problem.a.norm().powi(2) / gamma
    }
}

/// `W^k = (x, y, z, u)` plus the scalar parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub k: usize,
}

/// Starting point; missing pieces get solver defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Start {
    pub x0: Option<Vec<f64>>,
    pub u0: Option<Vec<f64>>,
    pub z0: Option<Vec<f64>>,
    pub theta0: Option<f64>,
}

impl Start {
    pub fn at(x0: Vec<f64>) -> Self {
        Self {
            x0: Some(x0),
            ..Self::default()
        }
    }
}

/// One iteration `k → k+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Index of the produced iterate.
    pub k: usize,
    pub theta: f64,
    /// `γ` used when forming `z^{k+1}` and `θ_{k+1}`.
    pub gamma: f64,
    /// `δ` used in `Ψ` for `θ_{k+1}` (the accepted step for the line search).
    pub delta: f64,
    pub psi: f64,
    /// `F(x^{k+1})`.
    pub objective: f64,
    pub dx: f64,
    pub du: f64,
    pub dz: f64,
    pub jk: usize,
    pub ls_trials: usize,
    pub time_s: f64,
    /// `f(Kx^{k+1})`.
    pub denominator: f64,
    /// `⟨Kx^{k+1}, y^{k+1}⟩ − f*(y^{k+1})`.
    pub fenchel_lower: f64,
    /// `g(w) + g*(z) − ⟨z, w⟩` with `w = Ax − γz` for the new `z`.
    pub z_gap: f64,
    pub z_norm: f64,
    pub guard_fired: bool,
    pub ls_exhausted: bool,
    /// `γ` and `δ` carried into the next iteration.
    pub gamma_next: f64,
    pub delta_next: f64,
    pub stage: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub method: String,
    pub theta0: f64,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn new(method: &str, theta0: f64) -> Self {
        Self {
            method: method.to_string(),
            theta0,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Ratio before record `i`.
    pub fn theta_before(&self, i: usize) -> f64 {
        if i == 0 {
            self.theta0
        } else {
            self.records[i - 1].theta
        }
    }

    /// First record index from which `γ`, `δ` never change, no backtracking
    /// happens and the guard never fires.
    pub fn freeze_index(&self) -> usize {
        let n = self.records.len();
        let mut start = n;
        for i in (0..n).rev() {
            let r = &self.records[i];
            let same = |o: &TraceRecord| o.gamma == r.gamma && o.delta == r.delta;
            let stable = r.jk == 0
                && !r.guard_fired
                && r.gamma_next == r.gamma
                && r.delta_next == r.delta
                && (i + 1 == n || same(&self.records[i + 1]));
            if !stable {
                break;
            }
            start = i;
        }
        start
    }

    /// `Γ` per record.
    pub fn gamma_merit(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.psi / r.fenchel_lower).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// Ran the requested number of iterations without a stopping test.
    Completed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: String,
    pub termination: Termination,
    pub iterations: usize,
    pub objective: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub x: Vec<f64>,
    pub state: Option<SolverState>,
    pub trace: Trace,
    pub report: RunReport,
}

/// `Ψ(x,z,u,δ,γ) = ⟨z,Ax⟩ − g*(z) + h(x) + ι_S(x) + δ/2‖x−u‖² − γ/2‖z‖²`.
///
/// Returns `+∞` outside `S` and `−∞` when `g*(z) = +∞`.
pub fn psi(problem: &FractionalProblem, x: &[f64], z: &[f64], u: &[f64], delta: f64, gamma: f64) -> f64 {
    if !problem.set.contains(x, MEMBERSHIP_TOL) {
        return f64::INFINITY;
    }
    let ax = problem.a.apply(x);
    psi_with(problem, x, &ax, z, u, delta, gamma)
}

pub(crate) fn psi_with(
    problem: &FractionalProblem,
    x: &[f64],
    ax: &[f64],
    z: &[f64],
    u: &[f64],
    delta: f64,
    gamma: f64,
) -> f64 {
    let gs = problem.g.conjugate(z);
    if gs == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    linalg::dot(z, ax) - gs
        + problem.h_value(x)
        + 0.5 * delta * linalg::dist(x, u).powi(2)
        - 0.5 * gamma * linalg::norm_sq(z)
}

/// `Π = Ψ / f(Kx)`.
pub fn merit_pi(
    problem: &FractionalProblem,
    x: &[f64],
    z: &[f64],
    u: &[f64],
    delta: f64,
    gamma: f64,
) -> Result<f64> {
    let den = problem.denominator(x);
    if !(den > 0.0) {
        return Err(Error::ModelViolation(format!("f(Kx) = {den} is not positive")));
    }
    Ok(psi(problem, x, z, u, delta, gamma) / den)
}

/// `Γ = Ψ / (⟨Kx, y⟩ − f*(y))`.
#[allow(clippy::too_many_arguments)]
pub fn merit_gamma(
    problem: &FractionalProblem,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    u: &[f64],
    delta: f64,
    gamma: f64,
) -> Result<f64> {
    let den = fenchel_lower(problem, x, y);
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::Domain(format!(
            "Fenchel lower bound {den} of the denominator is not positive"
        )));
    }
    Ok(psi(problem, x, z, u, delta, gamma) / den)
}

/// `⟨Kx, y⟩ − f*(y)`, a lower bound of `f(Kx)`.
pub fn fenchel_lower(problem: &FractionalProblem, x: &[f64], y: &[f64]) -> f64 {
    linalg::dot(&problem.k.apply(x), y) - problem.f.conjugate(y)
}

/// `z = prox_{g*,1/γ}(Ax/γ)`.
pub fn z_update(problem: &FractionalProblem, ax: &[f64], gamma: f64) -> Result<Vec<f64>> {
    function::prox_conjugate(problem.g.as_ref(), &linalg::scale(ax, 1.0 / gamma), 1.0 / gamma)
}

/// Fenchel-equality gap of a z-update: `g(w) + g*(z) − ⟨z, w⟩`, `w = Ax − γz`.
pub fn z_fenchel_gap(problem: &FractionalProblem, ax: &[f64], z: &[f64], gamma: f64) -> f64 {
    let mut w = ax.to_vec();
    linalg::axpy(-gamma, z, &mut w);
    problem.g.value(&w) + problem.g.conjugate(z) - linalg::dot(z, &w)
}

/// `Proj_S(u + (θ/δ)K*y − ∇h(x)/δ − A*z/δ)`.
#[allow(clippy::too_many_arguments)]
pub fn x_update(
    problem: &FractionalProblem,
    x: &[f64],
    u: &[f64],
    y: &[f64],
    z: &[f64],
    theta: f64,
    delta: f64,
) -> Vec<f64> {
    let d = direction(problem, x, y, z, theta);
    let mut v = u.to_vec();
    linalg::axpy(1.0 / delta, &d, &mut v);
    problem.set.project(&v)
}

/// `θK*y − ∇h(x) − A*z`.
pub fn direction(problem: &FractionalProblem, x: &[f64], y: &[f64], z: &[f64], theta: f64) -> Vec<f64> {
    let mut d = linalg::scale(&problem.k.adjoint(y), theta);
    linalg::axpy(-1.0, &problem.h.gradient(x), &mut d);
    linalg::axpy(-1.0, &problem.a.adjoint(z), &mut d);
    d
}

/// `y ∈ ∂f(Kx)`.
pub fn y_update(problem: &FractionalProblem, x: &[f64]) -> Result<Vec<f64>> {
    function::subgradient(problem.f.as_ref(), &problem.k.apply(x))
}

/// Relative-change (or relative-error) stopping test.
pub fn stopping_check(
    x_new: &[f64],
    x_old: &[f64],
    rule: StopRule,
    tol: f64,
    x_true: Option<&[f64]>,
) -> bool {
    let eps = f64::EPSILON;
    match rule {
        StopRule::RelativePrevious => {
            linalg::dist(x_new, x_old) / eps.max(linalg::norm(x_old)) <= tol
        }
        StopRule::RelativeNext => linalg::dist(x_new, x_old) / linalg::norm(x_new).max(eps) <= tol,
        StopRule::RelativeError => match x_true {
            Some(t) => linalg::dist(x_new, t) / linalg::norm(t) < tol,
            None => false,
        },
    }
}

/// A violated per-iteration inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub record: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Constants of the sufficient-decrease inequality.
#[derive(Debug, Clone, Copy)]
pub struct DescentConstants {
    pub nu: f64,
    pub beta: f64,
    pub slack: f64,
}

/// Checks `(θ_{k+1} − θ_k)·f(Kx^{k+1}) ≤ −ν‖Δx‖² − δ(2−β)/(2β)‖Δu‖² − γ/2‖Δz‖²`
/// on every record past the freeze index (the first frozen step is skipped
/// since its `θ_k` may predate the freeze).
pub fn descent_check(trace: &Trace, constants: DescentConstants) -> Vec<Violation> {
    let start = trace.freeze_index() + 1;
    let mut out = Vec::new();
    for i in start..trace.records.len() {
        let r = &trace.records[i];
        let lhs = (r.theta - trace.theta_before(i)) * r.denominator;
        let c2 = r.delta * (2.0 - constants.beta) / (2.0 * constants.beta);
        let rhs = -constants.nu * r.dx * r.dx - c2 * r.du * r.du - 0.5 * r.gamma * r.dz * r.dz;
        if lhs > rhs + constants.slack {
            out.push(Violation { record: i, lhs, rhs });
        }
    }
    out
}

/// Records past the freeze index where `θ` increases by more than `slack`.
pub fn monotonicity_check(trace: &Trace, slack: f64) -> Vec<Violation> {
    let start = trace.freeze_index() + 1;
    (start..trace.records.len())
        .filter_map(|i| {
            let (prev, cur) = (trace.theta_before(i), trace.records[i].theta);
            (cur > prev + slack).then_some(Violation {
                record: i,
                lhs: cur,
                rhs: prev,
            })
        })
        .collect()
}

/// Records past the freeze index where `Γ` increases or drops below `θ`.
pub fn gamma_merit_check(trace: &Trace, slack: f64) -> Vec<Violation> {
    let start = trace.freeze_index() + 1;
    let gm = trace.gamma_merit();
    let mut out = Vec::new();
    for i in start..trace.records.len() {
        if gm[i] > gm[i - 1] + slack {
            out.push(Violation {
                record: i,
                lhs: gm[i],
                rhs: gm[i - 1],
            });
        }
        if gm[i] < trace.records[i].theta - slack {
            out.push(Violation {
                record: i,
                lhs: gm[i],
                rhs: trace.records[i].theta,
            });
        }
    }
    out
}

pub(crate) fn initial_theta(problem: &FractionalProblem, x0: &[f64], given: Option<f64>) -> Result<f64> {
    match given {
        Some(t) => Ok(t),
        None => Ok(problem.objective(x0)?.max(THETA_FLOOR)),
    }
}

pub(crate) fn check_start(problem: &FractionalProblem, x0: &[f64]) -> Result<()> {
    Error::check_dim("starting point", problem.dim(), x0.len())?;
    if !problem.set.contains(x0, MEMBERSHIP_TOL) {
        return Err(Error::InvalidArgument("starting point lies outside S".into()));
    }
    Ok(())
}

/// Wall-clock helper honouring [`FspsConfig::record_time`].
pub(crate) struct Clock {
    start: std::time::Instant,
    enabled: bool,
}

impl Clock {
    pub fn new(enabled: bool) -> Self {
        Self {
            start: std::time::Instant::now(),
            enabled,
        }
    }

    pub fn stamp(&self) -> f64 {
        if self.enabled {
            self.start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
