use std::collections::BTreeMap;

use num_complex::Complex64;

use super::field::{dot_kv, norm3, SpectralField, Vec3c, HERMITIAN_RTOL, TORUS_VOLUME};
use super::grid::GridSpec;
use crate::error::{LabError, Result};

/// Finitely supported field as an ordered map `k -> fhat(k)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseField {
    modes: BTreeMap<[i64; 3], Vec3c>,
}

impl SparseField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` to the coefficient at `k`.
    pub fn insert(&mut self, k: [i64; 3], v: Vec3c) {
        let e = self.modes.entry(k).or_insert([Complex64::default(); 3]);
        for c in 0..3 {
            e[c] += v[c];
        }
    }

    pub fn get(&self, k: &[i64; 3]) -> Option<&Vec3c> {
        self.modes.get(k)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64; 3], &Vec3c)> {
        self.modes.iter()
    }

    pub fn extent(&self) -> [i64; 3] {
        let mut e = [0i64; 3];
        for k in self.modes.keys() {
            for d in 0..3 {
                e[d] = e[d].max(k[d].abs());
            }
        }
        e
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.values().map(norm3).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> (f64, [i64; 3]) {
        let zero = [Complex64::default(); 3];
        let mut worst = (0.0, [0, 0, 0]);
        for (k, v) in &self.modes {
            let w = self.modes.get(&[-k[0], -k[1], -k[2]]).unwrap_or(&zero);
            let d = (0..3).map(|c| (v[c] - w[c].conj()).norm()).fold(0.0, f64::max);
            if d > worst.0 {
                worst = (d, *k);
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

    pub fn divergence_residual(&self) -> f64 {
        let num = self
            .modes
            .iter()
            .map(|(k, v)| dot_kv(*k, v).norm())
            .fold(0.0, f64::max);
        num / self.max_abs().max(1.0)
    }

    pub fn energy(&self) -> f64 {
        TORUS_VOLUME
            * self
                .modes
                .values()
                .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum::<f64>()
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            modes: self
                .modes
                .iter()
                .map(|(k, v)| (*k, v.map(|z| z * a)))
                .collect(),
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (k, v) in &other.modes {
            self.insert(*k, *v);
        }
    }

    pub fn to_dense(&self, grid: GridSpec) -> Result<SpectralField> {
        let mut f = SpectralField::zeros(grid);
        for (k, v) in &self.modes {
            f.set(*k, *v)?;
        }
        Ok(f)
    }
}

impl FromIterator<([i64; 3], Vec3c)> for SparseField {
    fn from_iter<I: IntoIterator<Item = ([i64; 3], Vec3c)>>(iter: I) -> Self {
        let mut s = Self::new();
        for (k, v) in iter {
            s.insert(k, v);
        }
        s
    }
}
