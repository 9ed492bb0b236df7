//! The trilinear form `B(u, v, w) = ∫ v_i ∂_i w_j u_j dx` evaluated exactly on
//! sparse spectra, by quadrature on grids, and by lattice sums on block fields.

mod blocks;
mod grid;
mod lemma;
mod sparse;
mod sum;

pub use blocks::{trilinear_blocks, BlockRule, DEFAULT_NODE_BUDGET};
pub use grid::trilinear_grid;
pub use lemma::{
    evaluate_row, nse_decomposition, verify_lemma_tril, Decomposition, LemmaRow, ShellValue, TrilOptions,
    TrilinearReport, SLOPE_TOLERANCE,
};
pub use sparse::{trilinear_sparse, trilinear_sparse_with_budget, DEFAULT_PAIR_BUDGET};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Value of a trilinear form with its correctness diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrilinearValue {
    pub value: f64,
    /// Imaginary part of the raw sum; zero up to rounding for real fields.
    pub imag: f64,
    /// Sum of absolute values of the summed terms (a rounding scale).
    pub abs_sum: f64,
}

impl TrilinearValue {
    fn from_acc(acc: &sum::Accumulator, scale: Complex64) -> Self {
        let z = acc.value() * scale;
        Self {
            value: z.re,
            imag: z.im,
            abs_sum: acc.abs_sum() * scale.norm(),
        }
    }

    /// Rejects values whose imaginary part exceeds `rtol` of the term scale.
    pub fn checked_real(&self, rtol: f64) -> Result<f64> {
        if self.imag.abs() > rtol * self.abs_sum.max(f64::MIN_POSITIVE) {
            return Err(LabError::SymmetryViolation {
                at: [0, 0, 0],
                defect: self.imag,
            });
        }
        Ok(self.value)
    }
}
