//! Plain-text output: trace CSV, 8-bit PGM, matrix CSV and JSON summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solvers::Trace;

pub const TRACE_HEADER: &str = "k,theta,gamma,delta,psi,F,dx,du,dz,jk,ls_trials,time_s";

fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Renders a trace as CSV. The first row is iterate 0 (only `k`, `theta`
/// and `F` are meaningful there). With `with_method` a leading column names
/// the method.
pub fn trace_csv(trace: &Trace, x0_objective: f64, with_method: bool) -> String {
    let mut out = String::new();
    if with_method {
        out.push_str("method,");
    }
    out.push_str(TRACE_HEADER);
    out.push('\n');
    let prefix = if with_method {
        format!("{},", trace.method)
    } else {
        String::new()
    };
    let nan = fmt_f(f64::NAN);
    let _ = writeln!(
        out,
        "{prefix}0,{},{nan},{nan},{nan},{},{nan},{nan},{nan},0,0,0",
        fmt_f(trace.theta0),
        fmt_f(x0_objective)
    );
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{prefix}{},{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            fmt_f(r.theta),
            fmt_f(r.gamma),
            fmt_f(r.delta),
            fmt_f(r.psi),
            fmt_f(r.objective),
            fmt_f(r.dx),
            fmt_f(r.du),
            fmt_f(r.dz),
            r.jk,
            r.ls_trials,
            fmt_f(r.time_s)
        );
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &Trace, x0_objective: f64) -> Result<()> {
    fs::write(path, trace_csv(trace, x0_objective, false))?;
    Ok(())
}

/// Row-major `rows × cols` matrix as CSV.
pub fn matrix_csv(values: &[f64], rows: usize, cols: usize) -> Result<String> {
    Error::check_dim("matrix CSV", rows * cols, values.len())?;
    let mut out = String::with_capacity(values.len() * 20);
    for r in 0..rows {
        let line: Vec<String> = values[r * cols..(r + 1) * cols]
            .iter()
            .map(|v| fmt_f(*v))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_matrix_csv(path: &Path, values: &[f64], rows: usize, cols: usize) -> Result<()> {
    fs::write(path, matrix_csv(values, rows, cols)?)?;
    Ok(())
}

/// Binary 8-bit PGM, intensities clamped from `[lo, hi]` to `0..=255`.
pub fn pgm_bytes(values: &[f64], rows: usize, cols: usize, lo: f64, hi: f64) -> Result<Vec<u8>> {
    Error::check_dim("PGM image", rows * cols, values.len())?;
    if !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "PGM range [{lo}, {hi}] is empty"
        )));
    }
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(values.iter().map(|&v| {
        let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
        if t.is_nan() {
            0
        } else {
            (t * 255.0).round() as u8
        }
    }));
    Ok(out)
}

pub fn write_pgm(path: &Path, values: &[f64], rows: usize, cols: usize, lo: f64, hi: f64) -> Result<()> {
    fs::write(path, pgm_bytes(values, rows, cols, lo, hi)?)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_clamp() {
        let b = pgm_bytes(&[-1.0, 0.0, 0.5, 2.0], 2, 2, 0.0, 1.0).unwrap();
        assert!(b.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&b[b.len() - 4..], &[0, 0, 128, 255]);
        assert!(pgm_bytes(&[0.0], 2, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn trace_csv_has_iterate_zero() {
        let t = Trace::new("nls", 0.5);
        let s = trace_csv(&t, 0.5, true);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("method,k,theta"));
        assert!(lines[1].starts_with("nls,0,5.0"));
    }
}
