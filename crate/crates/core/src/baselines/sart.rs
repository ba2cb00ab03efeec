//! Simultaneous algebraic reconstruction with box projection.

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{Csr, LinearOperator};

/// Floor for row and column sums.
pub const SUM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SartRun {
    pub x: Vec<f64>,
    /// `‖Px − f‖` after each sweep.
    pub residuals: Vec<f64>,
}

/// `x ← Proj_[l,u](x + λ V⁻¹ Pᵀ W⁻¹ (f − Px))` with `W`, `V` the row and
/// column sums of `P`.
pub fn sart_run(
    projector: &Csr,
    measurements: &[f64],
    x0: &[f64],
    iterations: usize,
    relaxation: f64,
    bounds: (f64, f64),
) -> Result<SartRun> {
    Error::check_dim("SART measurements", projector.output_dim(), measurements.len())?;
    Error::check_dim("SART start", projector.input_dim(), x0.len())?;
    if iterations == 0 {
        return Err(Error::InvalidArgument("SART needs at least one sweep".into()));
    }
    let w: Vec<f64> = projector.row_sums().into_iter().map(|s| s.max(SUM_FLOOR)).collect();
    let v: Vec<f64> = projector.col_sums().into_iter().map(|s| s.max(SUM_FLOOR)).collect();
    let mut x = x0.to_vec();
    let mut px = vec![0.0; projector.output_dim()];
    let mut back = vec![0.0; projector.input_dim()];
    let mut residuals = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        projector.apply_into(&x, &mut px);
        let r: Vec<f64> = measurements
            .iter()
            .zip(&px)
            .zip(&w)
            .map(|((f, p), wi)| (f - p) / wi)
            .collect();
        projector.adjoint_into(&r, &mut back);
        for ((xi, bi), vi) in x.iter_mut().zip(&back).zip(&v) {
            *xi = (*xi + relaxation * bi / vi).clamp(bounds.0, bounds.1);
        }
        projector.apply_into(&x, &mut px);
        residuals.push(linalg::dist(&px, measurements));
    }
    Ok(SartRun { x, residuals })
}
