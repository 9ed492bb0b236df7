//! Dyadic shell decomposition with smooth cutoffs.
//!
//! `chi` equals 1 on `[0, 3/4]` and vanishes beyond 1; `phi(t) = chi(t/2) - chi(t)`
//! is supported in `[3/4, 2]` and equals 1 on `[1, 3/2]`. Shell `q >= 0` uses
//! `phi(|k| / 2^q)`, shell `-1` uses `chi(|k|)`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral::{
    check_exponent, default_quadrature, sample_norms, Components, Quadrature, SpectralField,
};

fn g(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth step from 0 (at `s <= 0`) to 1 (at `s >= 1`).
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = g(s);
        a / (a + g(1.0 - s))
    }
}

pub fn chi(t: f64) -> f64 {
    if t <= 0.75 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        smooth_step((1.0 - t) / 0.25)
    }
}

pub fn phi(t: f64) -> f64 {
    chi(0.5 * t) - chi(t)
}

/// `lambda_q = 2^q`, with `lambda_{-1} = 1/2`.
pub fn lambda(q: i32) -> f64 {
    2f64.powi(q)
}

/// Shell symbol at radius `r = |k|`.
pub fn shell_symbol(q: i32, r: f64) -> f64 {
    if q < 0 {
        chi(r)
    } else {
        phi(r / lambda(q))
    }
}

/// Symbol of the widened projection `sum_{|p-q|<=1}`.
pub fn tilde_symbol(q: i32, r: f64) -> f64 {
    (q - 1..=q + 1).filter(|&p| p >= -1).map(|p| shell_symbol(p, r)).sum()
}

fn radius(k: [i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

fn check_shell(q: i32) -> Result<()> {
    if q < -1 {
        return Err(LabError::InvalidParameter(format!("shell index q={q} must be >= -1")));
    }
    Ok(())
}

pub fn project_shell(f: &SpectralField, q: i32) -> Result<SpectralField> {
    check_shell(q)?;
    Ok(f.map_symbol(|k| shell_symbol(q, radius(k))))
}

pub fn project_tilde(f: &SpectralField, q: i32) -> Result<SpectralField> {
    if q < 0 {
        return Err(LabError::InvalidParameter(format!("widened shell index q={q} must be >= 0")));
    }
    Ok(f.map_symbol(|k| tilde_symbol(q, radius(k))))
}

/// Highest shell whose symbol can be nonzero on the grid.
pub fn max_shell(f: &SpectralField) -> i32 {
    let e = f.support_extent();
    let r = radius(e);
    let mut q = 0;
    while 0.75 * lambda(q) <= r {
        q += 1;
    }
    q
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub r: f64,
    /// Summability index; `f64::INFINITY` gives the supremum over shells.
    pub l: f64,
}

/// `[sum_q (lambda_q^s ‖f_q‖_r)^l]^{1/l}` over `q >= -1`.
pub fn besov_norm(f: &SpectralField, p: &BesovParams) -> Result<f64> {
    besov_norm_with(f, p, default_quadrature(p.r))
}

pub fn besov_norm_with(f: &SpectralField, p: &BesovParams, quad: Quadrature) -> Result<f64> {
    check_exponent(p.r)?;
    if p.l.is_nan() || p.l < 1.0 {
        return Err(LabError::InvalidExponent(p.l));
    }
    f.check_hermitian()?;
    let shape = [f.grid().n(); 3];
    let mut terms = Vec::new();
    for q in -1..=max_shell(f) {
        let fq = project_shell(f, q)?;
        let nq = sample_norms(&fq, Components::Vector, shape, &[p.r], quad)?[0];
        terms.push(lambda(q).powf(p.s) * nq);
    }
    Ok(if p.l.is_infinite() {
        terms.into_iter().fold(0.0, f64::max)
    } else {
        terms.iter().map(|t| t.powf(p.l)).sum::<f64>().powf(1.0 / p.l)
    })
}

/// `‖∇f_q‖_p / (lambda_q ‖f_q‖_p)`.
pub fn bernstein_ratio(f: &SpectralField, q: i32, p: f64) -> Result<f64> {
    check_exponent(p)?;
    f.check_hermitian()?;
    let fq = project_shell(f, q)?;
    let shape = [f.grid().n(); 3];
    let quad = default_quadrature(p);
    let a = sample_norms(&fq, Components::Gradient, shape, &[p], quad)?[0];
    let b = sample_norms(&fq, Components::Vector, shape, &[p], quad)?[0];
    if b == 0.0 {
        return Err(LabError::UndefinedRatio(q));
    }
    Ok(a / (lambda(q) * b))
}
