use num_complex::Complex64;

use super::grid::GridSpec;
use super::sparse::SparseField;
use crate::error::{LabError, Result};

pub type Vec3c = [Complex64; 3];

pub const ZERO3: Vec3c = [Complex64 { re: 0.0, im: 0.0 }; 3];

/// Dense vector field stored by its Fourier coefficients on a cubic grid.
///
/// Coefficients follow `f(x) = sum_k fhat(k) e^{ik.x}`; components are stored
/// separately in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    comps: [Vec<Complex64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    /// Builds a field from a coefficient function; the Nyquist plane is left at zero.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([i64; 3]) -> Vec3c) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let v = f(grid.wavevector(idx));
            for c in 0..3 {
                out.comps[c][idx] = v[c];
            }
        }
        out
    }

    pub fn from_components(grid: GridSpec, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(LabError::ShapeMismatch {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        let mut f = Self { grid, comps };
        f.zero_nyquist();
        Ok(f)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    pub fn at_index(&self, idx: usize) -> Vec3c {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn get(&self, k: [i64; 3]) -> Vec3c {
        self.grid.index(k).map(|i| self.at_index(i)).unwrap_or(ZERO3)
    }

    pub fn set(&mut self, k: [i64; 3], v: Vec3c) -> Result<()> {
        let idx = self.grid.index(k).ok_or(LabError::OutOfBand {
            k,
            kmax: self.grid.kmax(),
        })?;
        for c in 0..3 {
            self.comps[c][idx] = v[c];
        }
        Ok(())
    }

    pub fn zero_nyquist(&mut self) {
        for idx in 0..self.grid.len() {
            if self.grid.is_nyquist(idx) {
                for c in 0..3 {
                    self.comps[c][idx] = Complex64::default();
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| norm3(&self.at_index(i)))
            .fold(0.0, f64::max)
    }

    /// Largest |fhat(k) - conj(fhat(-k))| and where it occurs.
    pub fn hermitian_defect(&self) -> (f64, [i64; 3]) {
        let mut worst = (0.0, [0, 0, 0]);
        for idx in 0..self.grid.len() {
            let j = self.grid.conjugate_index(idx);
            let mut d = 0.0f64;
            for c in 0..3 {
                d = d.max((self.comps[c][idx] - self.comps[c][j].conj()).norm());
            }
            if d > worst.0 {
                worst = (d, self.grid.wavevector(idx));
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let (d, at) = self.hermitian_defect();
        if d > HERMITIAN_RTOL * self.max_abs().max(f64::MIN_POSITIVE) {
            return Err(LabError::SymmetryViolation { at, defect: d });
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.check_hermitian().is_ok()
    }

    pub fn is_solenoidal(&self) -> bool {
        self.divergence_residual() <= 1e-12
    }

    pub fn divergence_residual(&self) -> f64 {
        let mut num = 0.0f64;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let v = self.at_index(idx);
            num = num.max(dot_kv(k, &v).norm());
        }
        num / self.max_abs().max(1.0)
    }

    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let v = leray_apply(self.grid.wavevector(idx), &self.at_index(idx));
            for c in 0..3 {
                out.comps[c][idx] = v[c];
            }
        }
        out
    }

    pub fn derivative(&self, axis: usize) -> Result<Self> {
        if axis > 2 {
            return Err(LabError::AxisOutOfRange(axis));
        }
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let ik = Complex64::new(0.0, self.grid.wavevector(idx)[axis] as f64);
            for c in 0..3 {
                out.comps[c][idx] *= ik;
            }
        }
        out.zero_nyquist();
        Ok(out)
    }

    /// Applies a real radial symbol `m(k)` to every coefficient.
    pub fn map_symbol(&self, mut m: impl FnMut([i64; 3]) -> f64) -> Self {
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let s = m(self.grid.wavevector(idx));
            for c in 0..3 {
                out.comps[c][idx] *= s;
            }
        }
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.comps.iter_mut().for_each(|c| c.iter_mut().for_each(|z| *z *= a));
        out
    }

    pub fn axpy(&mut self, a: f64, x: &Self) -> Result<()> {
        if self.grid != x.grid {
            return Err(LabError::GridMismatch);
        }
        for c in 0..3 {
            for (y, xv) in self.comps[c].iter_mut().zip(&x.comps[c]) {
                *y += xv * a;
            }
        }
        Ok(())
    }

    pub fn sub(&self, x: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, x)?;
        Ok(out)
    }

    /// `∫ f·g dx = (2π)^3 sum_k fhat(k)·conj(ghat(k))` (real part).
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch);
        }
        let mut s = 0.0;
        for c in 0..3 {
            for (a, b) in self.comps[c].iter().zip(&other.comps[c]) {
                s += (a * b.conj()).re;
            }
        }
        Ok(TORUS_VOLUME * s)
    }

    /// `‖f‖_2^2` by Parseval.
    pub fn energy(&self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum();
        TORUS_VOLUME * s
    }

    /// `‖∇f‖_2^2` by Parseval.
    pub fn gradient_energy(&self) -> f64 {
        let mut s = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            s += k2 * (0..3).map(|c| self.comps[c][idx].norm_sqr()).sum::<f64>();
        }
        TORUS_VOLUME * s
    }

    pub fn to_sparse(&self) -> SparseField {
        let mut s = SparseField::new();
        for idx in 0..self.grid.len() {
            let v = self.at_index(idx);
            if v.iter().any(|z| *z != Complex64::default()) {
                s.insert(self.grid.wavevector(idx), v);
            }
        }
        s
    }

    /// Largest |k_i| carrying a nonzero coefficient.
    pub fn support_extent(&self) -> [i64; 3] {
        let mut e = [0i64; 3];
        for idx in 0..self.grid.len() {
            if self.at_index(idx).iter().any(|z| *z != Complex64::default()) {
                let k = self.grid.wavevector(idx);
                for d in 0..3 {
                    e[d] = e[d].max(k[d].abs());
                }
            }
        }
        e
    }
}

pub const TORUS_VOLUME: f64 = 8.0 * std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI;

pub(crate) const HERMITIAN_RTOL: f64 = 1e-12;

pub fn norm3(v: &Vec3c) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

pub fn dot_kv(k: [i64; 3], v: &Vec3c) -> Complex64 {
    v[0] * k[0] as f64 + v[1] * k[1] as f64 + v[2] * k[2] as f64
}

/// `(I - k k^T / |k|^2) v`, identity at `k = 0`.
pub fn leray_apply(k: [i64; 3], v: &Vec3c) -> Vec3c {
    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
    if k2 == 0.0 {
        return *v;
    }
    let kd = dot_kv(k, v) / k2;
    [
        v[0] - kd * k[0] as f64,
        v[1] - kd * k[1] as f64,
        v[2] - kd * k[2] as f64,
    ]
}

/// Real Leray symbol applied to a real direction, in floating point wavenumbers.
pub fn leray_real(k: [f64; 3], d: [f64; 3]) -> [f64; 3] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 {
        return d;
    }
    let s = (k[0] * d[0] + k[1] * d[1] + k[2] * d[2]) / k2;
    [d[0] - s * k[0], d[1] - s * k[1], d[2] - s * k[2]]
}
