//! Matrix-free solvers for nonsmooth, nonconvex single-ratio fractional programs
//!
//! ```text
//! minimize   F(x) = (g(Ax) + h(x)) / f(Kx)   subject to x ∈ S
//! ```
//!
//! where `g` and `f` are convex (possibly nonsmooth), `h` has a Lipschitz
//! gradient, `A` and `K` are linear maps and `S` is compact and convex.
//!
//! The crate is organised around a handful of oracles that the solvers touch
//! only through forward evaluations: [`operator::Operator`] for linear maps,
//! [`function::ConvexFunction`] for `g` and `f` (prox, conjugate, subgradient),
//! [`smooth::SmoothFunction`] for `h` and [`set::FeasibleSet`] for projections.
//! A [`problem::FractionalProblem`] bundles them.
//!
//! Solvers live in [`solvers`] (full-splitting proximal-subgradient family) and
//! [`baselines`] (Dinkelbach, SART, the γ ≡ 0 divergence harness). Every one
//! of them implements [`registry::Solver`] and can be looked up by name in a
//! [`registry::SolverRegistry`].

pub mod baselines;
pub mod error;
pub mod function;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod operator;
pub mod problem;
pub mod problems;
pub mod registry;
pub mod set;
pub mod smooth;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::FractionalProblem;
