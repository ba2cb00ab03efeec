//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use fsps_core::function::{
    Affine, ConvexFunction, Func, L1Norm, L2Norm, LInfNorm, PlusConstant, QuadraticAugmented,
    Reflected, Zero,
};
use fsps_core::operator::{Csr, Operator};
use fsps_core::problem::FractionalProblem;
use fsps_core::set::BoxSet;
use fsps_core::smooth::{Constant, SquaredResidual, Sum};
use fsps_core::solvers::Trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

// ---- grid search ------------------------------------------------------------

/// Minimizer of `obj` over the lattice `h·ℤ^d` inside the box of half-width
/// `radius` around `center` (d ≤ 2).
fn lattice_argmin(obj: &dyn Fn(&[f64]) -> f64, center: &[f64], radius: f64, h: f64) -> Vec<f64> {
    let lo: Vec<i64> = center.iter().map(|c| ((c - radius) / h).floor() as i64).collect();
    let hi: Vec<i64> = center.iter().map(|c| ((c + radius) / h).ceil() as i64).collect();
    let mut best = (f64::INFINITY, center.to_vec());
    match center.len() {
        1 => {
            for i in lo[0]..=hi[0] {
                let p = [i as f64 * h];
                let v = obj(&p);
                if v < best.0 {
                    best = (v, p.to_vec());
                }
            }
        }
        2 => {
            for i in lo[0]..=hi[0] {
                for j in lo[1]..=hi[1] {
                    let p = [i as f64 * h, j as f64 * h];
                    let v = obj(&p);
                    if v < best.0 {
                        best = (v, p.to_vec());
                    }
                }
            }
        }
        d => panic!("grid oracle supports d <= 2, got {d}"),
    }
    best.1
}

/// Grid minimizer: a coarse pass, a 1e-3 pass around the coarse winner, then
/// two finer passes. The extra passes matter when the minimizer sits on a
/// curved boundary of the domain, where the best 1e-3 lattice point can be
/// off by about the square root of the spacing. Valid for the strongly
/// convex prox objectives.
pub fn grid_argmin(obj: &dyn Fn(&[f64]) -> f64, center: &[f64], radius: f64) -> Vec<f64> {
    let mut p = lattice_argmin(obj, center, radius, 0.02);
    // near a curve the best lattice point drifts about h^(2/3) along it
    for (h, window) in [(1e-3, 0.03), (1e-4, 0.02), (1e-5, 0.006)] {
        p = lattice_argmin(obj, &p, window, h);
    }
    p
}

pub fn grid_prox(f: &dyn ConvexFunction, v: &[f64], kappa: f64) -> Vec<f64> {
    let obj = |y: &[f64]| {
        let d: f64 = y.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        f.value(y) + d / (2.0 * kappa)
    };
    grid_argmin(&obj, v, 4.0)
}

pub fn grid_prox_conjugate(f: &dyn ConvexFunction, v: &[f64], kappa: f64) -> Vec<f64> {
    let obj = |y: &[f64]| {
        let d: f64 = y.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        f.conjugate(y) + d / (2.0 * kappa)
    };
    grid_argmin(&obj, v, 4.0)
}

/// A random oracle of dimension `d` with a proximal map. `conjugate_gridable`
/// is false when the conjugate's domain is a single point.
pub fn random_oracle(rng: &mut ChaCha8Rng, d: usize) -> (String, Func, bool) {
    let r = random_vec(rng, d, -1.0, 1.0);
    match rng.gen_range(0..9) {
        0 => ("zero".into(), Arc::new(Zero), false),
        1 => {
            let tau = rng.gen_range(0.05..1.0);
            (format!("l1 tau={tau:.3}"), Arc::new(L1Norm { tau }), true)
        }
        2 => ("linf".into(), Arc::new(LInfNorm), true),
        3 => ("l2".into(), Arc::new(L2Norm), true),
        4 => (
            "affine".into(),
            Arc::new(Affine {
                a: r,
                c: rng.gen_range(-1.0..1.0),
            }),
            false,
        ),
        5 => (
            "l1 + c".into(),
            Arc::new(PlusConstant {
                inner: Arc::new(L1Norm { tau: 0.5 }),
                c: rng.gen_range(-1.0..1.0),
            }),
            true,
        ),
        6 => (
            "linf(r - x)".into(),
            Arc::new(Reflected {
                inner: Arc::new(LInfNorm),
                r,
            }),
            true,
        ),
        7 => {
            let s = rng.gen_range(0.01..1.0);
            (
                format!("l1 + quad s={s:.3}"),
                Arc::new(QuadraticAugmented {
                    inner: Arc::new(L1Norm { tau: 0.1 }),
                    s,
                }),
                true,
            )
        }
        _ => {
            let s = rng.gen_range(0.01..1.0);
            (
                format!("linf(r - x) + quad s={s:.3}"),
                Arc::new(QuadraticAugmented {
                    inner: Arc::new(Reflected {
                        inner: Arc::new(LInfNorm),
                        r,
                    }),
                    s,
                }),
                true,
            )
        }
    }
}

// ---- simplex ----------------------------------------------------------------

/// Sort-and-threshold projection onto the probability simplex: find the
/// largest `ρ` with `s_ρ > (Σ_{i≤ρ} s_i − 1)/ρ` and shift by that level.
pub fn simplex_oracle(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let prefix: Vec<f64> = s
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let rho = (1..=s.len())
        .filter(|&j| s[j - 1] - (prefix[j - 1] - 1.0) / j as f64 > 0.0)
        .max()
        .expect("the first sorted entry always qualifies");
    let level = (prefix[rho - 1] - 1.0) / rho as f64;
    v.iter().map(|&x| (x - level).max(0.0)).collect()
}

// ---- operators --------------------------------------------------------------

pub fn random_csr(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> Csr {
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = Vec::new();
        for j in 0..cols {
            if rng.gen_bool(density) {
                row.push((j, rng.gen_range(-2.0..2.0)));
            }
        }
        data.push(row);
    }
    Csr::from_rows(cols, data)
}

/// Worst adjoint mismatch `|⟨Ax,y⟩ − ⟨x,A*y⟩| / (1 + ‖x‖‖y‖)` over `pairs`
/// random pairs.
pub fn adjoint_mismatch(op: &Operator, pairs: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_vec(&mut rng, op.input_dim(), -1.0, 1.0);
        let y = random_vec(&mut rng, op.output_dim(), -1.0, 1.0);
        let lhs = dot(&op.apply(&x), &y);
        let rhs = dot(&x, &op.adjoint(&y));
        worst = worst.max((lhs - rhs).abs() / (1.0 + norm(&x) * norm(&y)));
    }
    worst
}

/// Worst `‖Ax‖ − (‖A‖ + 1e-8)‖x‖` over random `x`; nonpositive when the
/// estimate is an upper bound on the samples.
pub fn norm_bound_excess(op: &Operator, samples: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let est = op.norm();
    (0..samples)
        .map(|_| {
            let x = random_vec(&mut rng, op.input_dim(), -1.0, 1.0);
            norm(&op.apply(&x)) - (est + 1e-8) * norm(&x)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

// ---- Fenchel equality along traces -------------------------------------------

/// Largest `g(w) + g*(z) − ⟨z, w⟩` recorded in a trace.
pub fn max_fenchel_gap(trace: &Trace) -> f64 {
    trace
        .records
        .iter()
        .map(|r| r.z_gap.abs())
        .fold(0.0, f64::max)
}

// ---- quotient-rule oracle ---------------------------------------------------

/// `(½‖Bx − b‖² + 0.5‖Ax‖₁ + 1) / ‖Kx‖` on the box `[−10, 10]³`.
pub fn quadratic_over_norm(seed: u64) -> FractionalProblem {
    let mut rng = rng(seed);
    let a = Operator::dense(4, 3, random_vec(&mut rng, 12, -1.0, 1.0)).unwrap();
    let k = Operator::dense(3, 3, random_vec(&mut rng, 9, -1.0, 1.0)).unwrap();
    let b = Operator::dense(2, 3, random_vec(&mut rng, 6, -1.0, 1.0)).unwrap();
    let target = random_vec(&mut rng, 2, -1.0, 1.0);
    FractionalProblem::new(
        Arc::new(BoxSet::uniform(3, -10.0, 10.0).unwrap()),
        a,
        k,
        Arc::new(L1Norm { tau: 0.5 }),
        Arc::new(L2Norm),
        Arc::new(Sum {
            terms: vec![
                Arc::new(SquaredResidual::new(b, Some(target), 1.0)),
                Arc::new(Constant { c: 1.0, dim: 3 }),
            ],
        }),
    )
    .unwrap()
}

/// `f(Kx)²·‖∇F(x)‖` with `∇F` from central differences of the objective.
pub fn fd_stationarity(problem: &FractionalProblem, x: &[f64]) -> f64 {
    let h = 1e-6;
    let grad: Vec<f64> = (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (problem.objective(&p).unwrap() - problem.objective(&m).unwrap()) / (2.0 * h)
        })
        .collect();
    problem.denominator(x).powi(2) * norm(&grad)
}

/// Random points where `Ax` has no small entries and `Kx` is away from zero,
/// so the instance is differentiable there.
pub fn smooth_points(problem: &FractionalProblem, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let x = random_vec(&mut rng, 3, -2.0, 2.0);
        let ax = problem.a.apply(&x);
        if ax.iter().all(|v| v.abs() > 1e-2) && problem.denominator(&x) > 0.1 {
            out.push(x);
        }
    }
    out
}

// ---- criterion 6 -------------------------------------------------------------

/// Runs the oracle-equivalence checks and returns one message per failure.
pub fn oracle_suite(traces: &[&Trace]) -> Vec<String> {
    use fsps_core::function::{prox, prox_conjugate};
    use fsps_core::problems::ct::{discrete_gradient, parallel_beam_projector};
    use fsps_core::set::{FeasibleSet, Simplex};

    let mut failures = Vec::new();
    let mut r = rng(6);

    // prox and conjugate prox against the grid
    for case in 0..100 {
        let d = 1 + case % 2;
        let (name, f, conj_ok) = random_oracle(&mut r, d);
        let v = random_vec(&mut r, d, -2.0, 2.0);
        let kappa = r.gen_range(0.1..2.0);
        let p = prox(f.as_ref(), &v, kappa).unwrap();
        let g = grid_prox(f.as_ref(), &v, kappa);
        let err = p.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if err > 2e-3 {
            failures.push(format!("prox {name} v={v:?} kappa={kappa}: {p:?} vs grid {g:?}"));
        }
        if conj_ok {
            let p = prox_conjugate(f.as_ref(), &v, kappa).unwrap();
            let g = grid_prox_conjugate(f.as_ref(), &v, kappa);
            let err = p.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if err > 2e-3 {
                failures.push(format!("conjugate prox {name} v={v:?} kappa={kappa}: {p:?} vs grid {g:?}"));
            }
        }
    }

    // Moreau decomposition: 100 random (v, κ) for every oracle family
    for family in 0..9 {
        let mut fr = rng(600 + family);
        for _ in 0..100 {
            let d = fr.gen_range(1..6);
            let (name, f, _) = loop {
                let o = random_oracle(&mut fr, d);
                if kind_index(&o.0) == family as usize {
                    break o;
                }
            };
            let v = random_vec(&mut fr, d, -3.0, 3.0);
            let kappa = fr.gen_range(0.05..5.0);
            let p = prox(f.as_ref(), &v, kappa).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x / kappa).collect();
            let q = prox_conjugate(f.as_ref(), &scaled, 1.0 / kappa).unwrap();
            let err = (0..d).map(|i| (p[i] + kappa * q[i] - v[i]).abs()).fold(0.0, f64::max);
            if err > 1e-10 {
                failures.push(format!("Moreau {name} v={v:?} kappa={kappa}: residual {err:e}"));
            }
        }
    }

    // adjoints, 100 pairs per operator
    let mut ops: Vec<(&str, Operator)> = vec![
        ("identity", Operator::identity(7)),
        (
            "dense",
            Operator::dense(5, 8, random_vec(&mut r, 40, -1.0, 1.0)).unwrap(),
        ),
        ("csr", Operator::new(random_csr(&mut r, 30, 20, 0.2))),
        ("gradient", discrete_gradient(9).unwrap()),
    ];
    let angles: Vec<f64> = (0..25).map(|i| i as f64 * 7.3).collect();
    ops.push(("parallel beam", parallel_beam_projector(16, &angles, 27).unwrap()));
    for (i, (name, op)) in ops.iter().enumerate() {
        let m = adjoint_mismatch(op, 100, 60 + i as u64);
        if m > 1e-10 {
            failures.push(format!("adjoint {name}: mismatch {m:e}"));
        }
    }

    // simplex projection, bit for bit
    for i in 0..1000 {
        let n = 1 + i % 25;
        let v = random_vec(&mut r, n, -2.0, 2.0);
        let got = Simplex { n }.project(&v);
        let want = simplex_oracle(&v);
        if got != want {
            failures.push(format!("simplex v={v:?}: {got:?} vs {want:?}"));
        }
    }

    for t in traces {
        let gap = max_fenchel_gap(t);
        if !(gap <= 1e-8) {
            failures.push(format!("Fenchel gap {gap:e} along a {} trace", t.method));
        }
    }
    failures
}

fn kind_index(name: &str) -> usize {
    const KINDS: [&str; 9] = [
        "zero",
        "l1 tau",
        "linf",
        "l2",
        "affine",
        "l1 + c",
        "linf(r - x)",
        "l1 + quad",
        "linf(r - x) + quad",
    ];
    // longest matching prefix wins
    KINDS
        .iter()
        .enumerate()
        .filter(|(_, k)| name.starts_with(*k))
        .max_by_key(|(_, k)| k.len())
        .map(|(i, _)| i)
        .unwrap()
}
