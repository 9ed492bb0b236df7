#![allow(dead_code)]

use lab_core::spectral::{leray_apply, GridSpec, SpectralField, Vec3c};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real field with modes `0 < |k_i| <= kmax`, amplitudes decaying like `|k|^-2`.
pub fn random_field(g: GridSpec, kmax: i64, seed: u64, solenoidal: bool) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(g);
    for idx in 0..g.len() {
        let k = g.wavevector(idx);
        if g.is_nyquist(idx) || k.iter().any(|c| c.abs() > kmax) || k == [0, 0, 0] {
            continue;
        }
        if g.conjugate_index(idx) < idx {
            continue;
        }
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let mut v: Vec3c = [Complex64::default(); 3];
        for c in &mut v {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / k2;
        }
        if solenoidal {
            v = leray_apply(k, &v);
        }
        f.set(k, v).unwrap();
        f.set([-k[0], -k[1], -k[2]], v.map(|c| c.conj())).unwrap();
    }
    f
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
