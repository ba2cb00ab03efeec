//! Matrix-free linear operators.
//!
//! An [`Operator`] wraps any [`LinearOperator`] together with a lazily
//! computed power-iteration estimate of its spectral norm.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Power-iteration settings used for the cached norm estimate.
pub const NORM_ITERS: usize = 100;
pub const NORM_SEED: u64 = 0;

pub trait LinearOperator: Send + Sync + fmt::Debug {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    /// `out = A x`; `out` has length `output_dim`.
    fn apply_into(&self, x: &[f64], out: &mut [f64]);
    /// `out = A* y`; `out` has length `input_dim`.
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]);
    /// Serializable description, when the operator has one.
    fn spec(&self) -> Option<OperatorSpec> {
        None
    }
    /// Exact norm when known in closed form.
    fn known_norm(&self) -> Option<f64> {
        None
    }
}

#[derive(Clone)]
pub struct Operator {
    inner: Arc<dyn LinearOperator>,
    norm: Arc<OnceLock<f64>>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("inner", &self.inner)
            .field("norm", &self.norm.get())
            .finish()
    }
}

impl Operator {
    pub fn new<L: LinearOperator + 'static>(op: L) -> Self {
        Self::from_arc(Arc::new(op))
    }

    pub fn from_arc(inner: Arc<dyn LinearOperator>) -> Self {
        Self {
            inner,
            norm: Arc::new(OnceLock::new()),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Identity { n })
    }

    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Ok(Self::new(Dense::new(rows, cols, data)?))
    }

    pub fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.inner.output_dim()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_dim(), "operator input dimension");
        let mut out = vec![0.0; self.output_dim()];
        self.inner.apply_into(x, &mut out);
        out
    }

    pub fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.output_dim(), "operator output dimension");
        let mut out = vec![0.0; self.input_dim()];
        self.inner.adjoint_into(y, &mut out);
        out
    }

    /// Cached `‖A‖`: the closed form when the operator knows it, otherwise
    /// [`op_norm_estimate`] with [`NORM_ITERS`] iterations and seed [`NORM_SEED`].
    pub fn norm(&self) -> f64 {
        *self.norm.get_or_init(|| {
            self.inner
                .known_norm()
                .unwrap_or_else(|| power_iteration(self, NORM_ITERS, NORM_SEED))
        })
    }

    /// Overrides the cached norm (e.g. with an analytic bound).
    pub fn with_norm(self, value: f64) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(value);
        Self {
            inner: self.inner,
            norm: Arc::new(cell),
        }
    }

    pub fn spec(&self) -> Option<OperatorSpec> {
        self.inner.spec()
    }

    pub fn inner(&self) -> &Arc<dyn LinearOperator> {
        &self.inner
    }
}

/// Power-iteration estimate of `‖op‖` (square root of the top eigenvalue of `A*A`).
/// Deterministic for a fixed seed.
pub fn op_norm_estimate(op: &Operator, iters: usize, seed: u64) -> Result<f64> {
    if iters == 0 {
        return Err(Error::InvalidArgument("power iteration needs iters >= 1".into()));
    }
    if op.input_dim() == 0 || op.output_dim() == 0 {
        return Err(Error::InvalidArgument("zero-dimensional operator".into()));
    }
    Ok(power_iteration(op, iters, seed))
}

fn power_iteration(op: &Operator, iters: usize, seed: u64) -> f64 {
    let n = op.input_dim();
    if n == 0 || op.output_dim() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nv = linalg::norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut estimate = 0.0;
    for _ in 0..iters {
        let av = op.apply(&v);
        let w = op.adjoint(&av);
        let nw = linalg::norm(&w);
        estimate = linalg::norm(&av);
        if nw == 0.0 {
            break;
        }
        v = linalg::scale(&w, 1.0 / nw);
    }
    // One more forward pass on the final direction.
    estimate.max(linalg::norm(&op.apply(&v)))
}

/// Serializable operator description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity {
        n: usize,
    },
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
    /// Forward-difference image gradient with Neumann boundary.
    Gradient {
        side: usize,
    },
    /// Ray-driven parallel-beam projector.
    ParallelBeam {
        side: usize,
        angles_deg: Vec<f64>,
        detectors: usize,
    },
}

impl OperatorSpec {
    pub fn build(&self) -> Result<Operator> {
        match self {
            OperatorSpec::Identity { n } => Ok(Operator::identity(*n)),
            OperatorSpec::Dense { rows, cols, data } => Operator::dense(*rows, *cols, data.clone()),
            OperatorSpec::Gradient { side } => crate::problems::ct::discrete_gradient(*side),
            OperatorSpec::ParallelBeam {
                side,
                angles_deg,
                detectors,
            } => crate::problems::ct::parallel_beam_projector(*side, angles_deg, *detectors),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Identity {
    pub n: usize,
}

impl LinearOperator for Identity {
    fn input_dim(&self) -> usize {
        self.n
    }
    fn output_dim(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
    fn spec(&self) -> Option<OperatorSpec> {
        Some(OperatorSpec::Identity { n: self.n })
    }
    fn known_norm(&self) -> Option<f64> {
        Some(if self.n == 0 { 0.0 } else { 1.0 })
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Error::check_dim("dense operator data", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl LinearOperator for Dense {
    fn input_dim(&self) -> usize {
        self.cols
    }
    fn output_dim(&self) -> usize {
        self.rows
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = linalg::dot(self.row(i), x);
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                linalg::axpy(yi, self.row(i), out);
            }
        }
    }
    fn spec(&self) -> Option<OperatorSpec> {
        Some(OperatorSpec::Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        })
    }
}

/// Compressed sparse row matrix; the adjoint scatters along rows.
#[derive(Debug, Clone)]
pub struct Csr {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    spec: Option<OperatorSpec>,
}

impl Csr {
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in &rows {
            for &(j, v) in row {
                debug_assert!(j < cols);
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self {
            rows: rows.len(),
            cols,
            indptr,
            indices,
            values,
            spec: None,
        }
    }

    pub fn with_spec(mut self, spec: OperatorSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Sum of each row.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    /// Sum of each column.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (&j, &v) in self.indices.iter().zip(&self.values) {
            out[j] += v;
        }
        out
    }
}

impl LinearOperator for Csr {
    fn input_dim(&self) -> usize {
        self.cols
    }
    fn output_dim(&self) -> usize {
        self.rows
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *o = acc;
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for k in self.indptr[i]..self.indptr[i + 1] {
                out[self.indices[k]] += self.values[k] * yi;
            }
        }
    }
    fn spec(&self) -> Option<OperatorSpec> {
        self.spec.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm_is_one() {
        let id = Operator::identity(3);
        let est = op_norm_estimate(&id, 50, 0).unwrap();
        assert!((est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_dimensional_operator_is_rejected() {
        let op = Operator::identity(0);
        assert!(op_norm_estimate(&op, 10, 0).is_err());
        assert!(op_norm_estimate(&Operator::identity(2), 0, 0).is_err());
    }

    #[test]
    fn dct_matrix_norm() {
        // BᵀB = 2·0.7071²·I, so ‖B‖ = 0.7071·√2.
        let b = Operator::dense(2, 2, vec![0.7071, 0.7071, 0.7071, -0.7071]).unwrap();
        let est = op_norm_estimate(&b, 100, 0).unwrap();
        assert!((est - 0.7071 * 2f64.sqrt()).abs() < 1e-12);
        assert!((est - 1.0).abs() < 1e-4);
    }

    #[test]
    fn dense_adjoint_matches_transpose() {
        let a = Operator::dense(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.apply(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        assert_eq!(a.adjoint(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn power_iteration_is_deterministic() {
        let a = Operator::dense(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let e1 = op_norm_estimate(&a, 20, 7).unwrap();
        let e2 = op_norm_estimate(&a, 20, 7).unwrap();
        assert_eq!(e1.to_bits(), e2.to_bits());
    }
}
