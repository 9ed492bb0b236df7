//! Fields on the 3-torus: dense and sparse Fourier representations, transforms,
//! Leray projection and `L^p` norms.

mod fft;
mod field;
mod grid;
mod physical;
pub mod snapshot;
mod sparse;
mod synth;

pub use fft::Fft3;
pub use field::{
    dot_kv, leray_apply, leray_real, norm3, SpectralField, Vec3c, TORUS_VOLUME, ZERO3,
};
pub use grid::{fft_friendly, GridSpec};
pub use physical::{gradient_lp_norm_with, lp_norm, lp_norm_with, to_physical, to_spectral, PhysicalField};
pub use sparse::SparseField;
pub use synth::{
    check_exponent, default_quadrature, sample_norms, source_norms, synthesis_shape, Components,
    ModeSource, Quadrature,
};

pub fn leray_project(f: &SpectralField) -> SpectralField {
    f.leray_project()
}

pub fn derivative(f: &SpectralField, axis: usize) -> crate::error::Result<SpectralField> {
    f.derivative(axis)
}

pub fn divergence_residual(f: &SpectralField) -> f64 {
    f.divergence_residual()
}
