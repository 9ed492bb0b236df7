use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Ordinary least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(LabError::InsufficientData {
            got: n.min(y.len()),
            required: 2,
        });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(LabError::InvalidParameter("degenerate abscissae in fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        residual: (ss / n as f64).sqrt(),
        points: n,
    })
}

/// Slope of `log2 |v|` against `q`, dropping the first point.
pub fn log2_slope_after_first(q: &[i32], v: &[f64]) -> Result<LineFit> {
    if q.len() < 3 {
        return Err(LabError::InsufficientData {
            got: q.len(),
            required: 3,
        });
    }
    let x: Vec<f64> = q[1..].iter().map(|&a| a as f64).collect();
    let y: Vec<f64> = v[1..].iter().map(|b| b.abs().log2()).collect();
    if y.iter().any(|a| !a.is_finite()) {
        return Err(LabError::InvalidParameter("zero value in log-log fit".into()));
    }
    ols(&x, &y)
}
