//! Robust sharp-ratio portfolio instances on the probability simplex.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::function::{LInfNorm, MaxBlockSquares, Reflected};
use crate::operator::Operator;
use crate::problem::FractionalProblem;
use crate::set::Simplex;
use crate::smooth::Constant;

/// Convexification parameter applied by [`make_sharp_ratio`].
pub const S_CVX: f64 = 0.01;
pub const EIG_LO: f64 = 1e-3;
pub const EIG_HI: f64 = 1.0 + 1e-3;

#[derive(Debug, Clone)]
pub struct SharpRatioInstance {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub seed: u64,
    /// Rows `a_i`.
    pub a: Vec<Vec<f64>>,
    pub r: Vec<f64>,
    /// `C_i^{1/2}`, row-major `n × n`.
    pub c_half: Vec<Vec<f64>>,
    pub eigenvalues: Vec<Vec<f64>>,
    /// `max_i (r_i − a_iᵀx) / max_j ‖C_j^{1/2}x‖²` over the simplex, before
    /// convexification.
    pub original: FractionalProblem,
    /// The same problem convexified with `s = 0.01`.
    pub problem: FractionalProblem,
}

pub fn make_sharp_ratio(n: usize, m1: usize, m2: usize, seed: u64) -> Result<SharpRatioInstance> {
    if n == 0 || m1 == 0 || m2 == 0 {
        return Err(Error::InvalidArgument("n, m1, m2 must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<Vec<f64>> = (0..m1).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
    let r: Vec<f64> = a
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max) + rng.gen::<f64>())
        .collect();
    let mut c_half = Vec::with_capacity(m2);
    let mut eigenvalues = Vec::with_capacity(m2);
    for _ in 0..m2 {
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let q = g.qr().q();
        let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(EIG_LO..EIG_HI)).collect();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            lam.iter().map(|l| l.sqrt()),
        ));
        let root = &q * d * q.transpose();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(0.5 * (root[(i, j)] + root[(j, i)]));
            }
        }
        c_half.push(data);
        eigenvalues.push(lam);
    }

    let a_op = Operator::dense(m1, n, a.concat())?;
    let k_op = Operator::dense(m2 * n, n, c_half.concat())?;
    let original = FractionalProblem::new(
        Arc::new(Simplex { n }),
        a_op,
        k_op,
        Arc::new(Reflected {
            inner: Arc::new(LInfNorm),
            r: r.clone(),
        }),
        Arc::new(MaxBlockSquares {
            blocks: m2,
            block_len: n,
        }),
        Arc::new(Constant { c: 0.0, dim: n }),
    )?;
    let problem = original.convexify(S_CVX)?;
    Ok(SharpRatioInstance {
        n,
        m1,
        m2,
        seed,
        a,
        r,
        c_half,
        eigenvalues,
        original,
        problem,
    })
}

/// Scenario sizes `(n, m1, m2)` used in the comparison study.
pub const SCENARIOS: [(usize, usize, usize); 6] = [
    (100, 5, 20),
    (100, 20, 5),
    (100, 20, 20),
    (400, 20, 10),
    (400, 10, 20),
    (400, 20, 20),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let a = make_sharp_ratio(12, 3, 4, 9).unwrap();
        let b = make_sharp_ratio(12, 3, 4, 9).unwrap();
        assert_eq!(a.c_half, b.c_half);
        assert_eq!(a.r, b.r);
        for (ai, ri) in a.a.iter().zip(&a.r) {
            assert!(*ri >= ai.iter().copied().fold(0.0, f64::max));
        }
        for lam in &a.eigenvalues {
            assert!(lam.iter().all(|&l| (EIG_LO..EIG_HI).contains(&l)));
        }
        assert!(make_sharp_ratio(0, 1, 1, 0).is_err());
    }

    #[test]
    fn root_factor_squares_to_the_spectrum() {
        let inst = make_sharp_ratio(6, 1, 1, 3).unwrap();
        let root = DMatrix::from_row_slice(6, 6, &inst.c_half[0]);
        let c = &root * &root;
        let mut eig: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let mut want = inst.eigenvalues[0].clone();
        want.sort_by(f64::total_cmp);
        for (x, y) in eig.iter().zip(&want) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
