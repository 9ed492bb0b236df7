use num_complex::Complex64;

use super::fft::Fft3;
use super::field::SpectralField;
use super::grid::GridSpec;
use super::synth::{check_exponent, default_quadrature, sample_norms, Components, Quadrature};
use crate::error::{LabError, Result};

/// Real point samples `f(x_m)`, `x_m = 2π m / n`, in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    comps: [Vec<f64>; 3],
}

impl PhysicalField {
    pub fn new(grid: GridSpec, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(LabError::ShapeMismatch {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self { grid, comps })
    }

    /// Samples a function of position.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let n = grid.n();
        let h = grid.spacing();
        let mut comps = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let v = f([i as f64 * h, j as f64 * h, l as f64 * h]);
                    let idx = (i * n + j) * n + l;
                    for c in 0..3 {
                        comps[c][idx] = v[c];
                    }
                }
            }
        }
        Self { grid, comps }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }
}

/// Synthesis `f(x) = sum_k fhat(k) e^{ik.x}` on the field's grid.
pub fn to_physical(f: &SpectralField) -> Result<PhysicalField> {
    f.check_hermitian()?;
    let g = f.grid();
    let mut fft = Fft3::new([g.n(); 3]);
    let c = f.components();
    let mut buf: Vec<Complex64> = c[0]
        .iter()
        .zip(&c[1])
        .map(|(a, b)| a + Complex64::i() * b)
        .collect();
    fft.inverse(&mut buf);
    let x: Vec<f64> = buf.iter().map(|z| z.re).collect();
    let y: Vec<f64> = buf.iter().map(|z| z.im).collect();
    buf.copy_from_slice(&c[2]);
    fft.inverse(&mut buf);
    let z: Vec<f64> = buf.iter().map(|z| z.re).collect();
    Ok(PhysicalField { grid: g, comps: [x, y, z] })
}

/// Analysis `fhat(k) = n^{-3} sum_x f(x) e^{-ik.x}`; the Nyquist plane is dropped.
pub fn to_spectral(p: &PhysicalField) -> SpectralField {
    let g = p.grid;
    let mut fft = Fft3::new([g.n(); 3]);
    let norm = 1.0 / g.len() as f64;
    let mut buf: Vec<Complex64> = p.comps[0]
        .iter()
        .zip(&p.comps[1])
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    fft.forward(&mut buf);
    let mut cx = vec![Complex64::default(); g.len()];
    let mut cy = vec![Complex64::default(); g.len()];
    for idx in 0..g.len() {
        let zk = buf[idx];
        let zm = buf[g.conjugate_index(idx)].conj();
        cx[idx] = (zk + zm) * (0.5 * norm);
        cy[idx] = (zk - zm) * Complex64::new(0.0, -0.5 * norm);
    }
    for (b, &v) in buf.iter_mut().zip(&p.comps[2]) {
        *b = Complex64::new(v, 0.0);
    }
    fft.forward(&mut buf);
    let cz: Vec<Complex64> = buf.iter().map(|z| z * norm).collect();
    let mut out = SpectralField::zeros(g);
    *out.components_mut() = [cx, cy, cz];
    out.zero_nyquist();
    out
}

/// `‖f‖_{L^p(T^3)}` with the default quadrature for `p`.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    lp_norm_with(f, p, default_quadrature(p))
}

pub fn lp_norm_with(f: &SpectralField, p: f64, quad: Quadrature) -> Result<f64> {
    check_exponent(p)?;
    f.check_hermitian()?;
    Ok(sample_norms(f, Components::Vector, [f.grid().n(); 3], &[p], quad)?[0])
}

/// `‖∇f‖_{L^p}` with the Frobenius norm of the gradient at each point.
pub fn gradient_lp_norm_with(f: &SpectralField, p: f64, quad: Quadrature) -> Result<f64> {
    check_exponent(p)?;
    f.check_hermitian()?;
    Ok(sample_norms(f, Components::Gradient, [f.grid().n(); 3], &[p], quad)?[0])
}
