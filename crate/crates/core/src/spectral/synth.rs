use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::Fft3;
use super::field::{SpectralField, Vec3c, TORUS_VOLUME};
use super::sparse::SparseField;
use crate::error::{LabError, Result};

/// Anything that can list its Fourier coefficients. Sources must be Hermitian.
pub trait ModeSource {
    fn for_each_mode(&self, f: &mut dyn FnMut([i64; 3], Vec3c));
    /// Largest |k_i| with a nonzero coefficient, per axis.
    fn extent(&self) -> [i64; 3];
}

impl ModeSource for SparseField {
    fn for_each_mode(&self, f: &mut dyn FnMut([i64; 3], Vec3c)) {
        for (k, v) in self.iter() {
            f(*k, *v);
        }
    }
    fn extent(&self) -> [i64; 3] {
        SparseField::extent(self)
    }
}

impl ModeSource for SpectralField {
    fn for_each_mode(&self, f: &mut dyn FnMut([i64; 3], Vec3c)) {
        let g = self.grid();
        for idx in 0..g.len() {
            let v = self.at_index(idx);
            if v.iter().any(|z| *z != Complex64::default()) {
                f(g.wavevector(idx), v);
            }
        }
    }
    fn extent(&self) -> [i64; 3] {
        self.support_extent()
    }
}

/// Which pointwise quantity is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Components {
    /// `|f(x)|` over the three components.
    Vector,
    /// Frobenius norm of `∇f(x)` over nine components.
    Gradient,
}

impl Components {
    fn count(self) -> usize {
        match self {
            Components::Vector => 3,
            Components::Gradient => 9,
        }
    }

    fn eval(self, c: usize, k: [i64; 3], v: &Vec3c) -> Complex64 {
        match self {
            Components::Vector => v[c],
            Components::Gradient => v[c % 3] * Complex64::new(0.0, k[c / 3] as f64),
        }
    }
}

/// Sample set used by the Riemann-sum norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Quadrature {
    /// The synthesis grid itself.
    #[default]
    Base,
    /// The synthesis grid plus its seven half-cell translates (a 2x grid per axis).
    Doubled,
}

/// Default quadrature: doubled sampling for the sup norm, base grid otherwise.
pub fn default_quadrature(p: f64) -> Quadrature {
    if p.is_infinite() {
        Quadrature::Doubled
    } else {
        Quadrature::Base
    }
}

pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(LabError::InvalidExponent(p));
    }
    Ok(())
}

/// Smallest FFT-friendly alias-free synthesis shape for a spectral extent.
pub fn synthesis_shape(extent: [i64; 3]) -> [usize; 3] {
    extent.map(|e| super::grid::fft_friendly(2 * e.max(0) as usize + 2))
}

/// Computes `‖·‖_p` for each `p` in `ps` from point samples of `src`.
///
/// `shape` must resolve every wavenumber of `src` without aliasing.
pub fn sample_norms<S: ModeSource + ?Sized>(
    src: &S,
    comps: Components,
    shape: [usize; 3],
    ps: &[f64],
    quad: Quadrature,
) -> Result<Vec<f64>> {
    for &p in ps {
        check_exponent(p)?;
    }
    let ext = src.extent();
    for d in 0..3 {
        if 2 * ext[d] + 1 > shape[d] as i64 {
            return Err(LabError::Resolution {
                needed: ext[d],
                available: (shape[d] as i64 - 1) / 2,
            });
        }
    }
    let shifts: Vec<[f64; 3]> = match quad {
        Quadrature::Base => vec![[0.0; 3]],
        Quadrature::Doubled => {
            let h = shape.map(|m| std::f64::consts::PI / m as f64);
            (0..8)
                .map(|b| [0, 1, 2].map(|d| if b >> d & 1 == 1 { h[d] } else { 0.0 }))
                .collect()
        }
    };
    let total: usize = shape.iter().product();
    let mut fft = Fft3::new(shape);
    let mut buf = vec![Complex64::default(); total];
    let mut mag2 = vec![0.0f64; total];
    let mut sums = vec![0.0f64; ps.len()];
    let mut sup = 0.0f64;
    let ncomp = comps.count();
    let index = |k: [i64; 3]| {
        let i = |d: usize| k[d].rem_euclid(shape[d] as i64) as usize;
        (i(0) * shape[1] + i(1)) * shape[2] + i(2)
    };

    for delta in &shifts {
        mag2.iter_mut().for_each(|m| *m = 0.0);
        let mut c = 0;
        while c < ncomp {
            let pair = c + 1 < ncomp;
            buf.iter_mut().for_each(|z| *z = Complex64::default());
            src.for_each_mode(&mut |k, v| {
                let ph = k[0] as f64 * delta[0] + k[1] as f64 * delta[1] + k[2] as f64 * delta[2];
                let phase = Complex64::from_polar(1.0, ph);
                let mut z = comps.eval(c, k, &v);
                if pair {
                    z += Complex64::i() * comps.eval(c + 1, k, &v);
                }
                buf[index(k)] += z * phase;
            });
            fft.inverse(&mut buf);
            if pair {
                for (m, z) in mag2.iter_mut().zip(&buf) {
                    *m += z.norm_sqr();
                }
            } else {
                for (m, z) in mag2.iter_mut().zip(&buf) {
                    *m += z.re * z.re;
                }
            }
            c += 2;
        }
        for (s, &p) in sums.iter_mut().zip(ps) {
            if p.is_finite() {
                *s += if p == 2.0 {
                    mag2.iter().sum::<f64>()
                } else {
                    mag2.iter().map(|m| m.powf(0.5 * p)).sum::<f64>()
                };
            }
        }
        sup = sup.max(mag2.iter().cloned().fold(0.0, f64::max).sqrt());
    }

    let weight = TORUS_VOLUME / (total * shifts.len()) as f64;
    Ok(ps
        .iter()
        .zip(&sums)
        .map(|(&p, &s)| if p.is_infinite() { sup } else { (s * weight).powf(1.0 / p) })
        .collect())
}

/// `‖f‖_p` on an alias-free anisotropic grid fitted to the support of `src`.
pub fn source_norms<S: ModeSource + ?Sized>(
    src: &S,
    comps: Components,
    ps: &[f64],
    quad: Quadrature,
    point_budget: usize,
) -> Result<Vec<f64>> {
    // Bound the point count before searching for FFT-friendly sizes.
    let raw: u128 = src.extent().iter().map(|&e| 2 * e.max(0) as u128 + 2).product();
    if raw > point_budget as u128 {
        return Err(LabError::SupportBudget {
            work: raw,
            budget: point_budget as u128,
        });
    }
    let shape = synthesis_shape(src.extent());
    let pts: usize = shape.iter().product();
    if pts > point_budget {
        return Err(LabError::SupportBudget {
            work: pts as u128,
            budget: point_budget as u128,
        });
    }
    sample_norms(src, comps, shape, ps, quad)
}
