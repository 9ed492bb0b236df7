use serde::{Deserialize, Serialize};

use super::block_field::BlockField;
use super::params::{ConstructionParams, Mode};
use super::{build_blocks, synthesize_psi, InitialData, ShellData};
use crate::error::{LabError, Result};
use crate::fit::{log2_slope_after_first, LineFit};
use crate::lattice::SumRule;
use crate::littlewood_paley::lambda;
use crate::spectral::{source_norms, Components, Quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShellPiece {
    /// `U_{q_j}`
    UTop,
    /// `U_{q_j - 1}`
    ULow,
    /// `B_{q_j}`
    B,
}

impl ShellPiece {
    pub fn label(self) -> &'static str {
        match self {
            ShellPiece::UTop => "U_q",
            ShellPiece::ULow => "U_q-1",
            ShellPiece::B => "B_q",
        }
    }

    pub fn of(self, s: &ShellData) -> &BlockField {
        match self {
            ShellPiece::UTop => &s.u_top,
            ShellPiece::ULow => &s.u_low,
            ShellPiece::B => &s.b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Largest synthesis grid (points) used for `p != 2`.
    pub point_budget: usize,
    pub quadrature: Quadrature,
    /// Lattice size up to which `p = 2` is summed exactly.
    pub exact_limit: u128,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            point_budget: 1 << 22,
            quadrature: Quadrature::Doubled,
            exact_limit: 20_000_000,
        }
    }
}

/// `‖f‖_p` for each `p`; `p = 2` by Parseval on the blocks, others on a fitted grid.
pub fn piece_norms(f: &BlockField, ps: &[f64], opt: &NormOptions) -> Result<Vec<f64>> {
    let grid_ps: Vec<f64> = ps.iter().cloned().filter(|&p| p != 2.0).collect();
    let grid_vals = if grid_ps.is_empty() {
        Vec::new()
    } else {
        source_norms(f, Components::Vector, &grid_ps, opt.quadrature, opt.point_budget)?
    };
    let mut it = grid_vals.into_iter();
    let rule = if f.lattice_count() <= opt.exact_limit {
        SumRule::exact()
    } else {
        SumRule::quadrature()
    };
    ps.iter()
        .map(|&p| {
            if p == 2.0 {
                Ok(f.l2_norm_sq(&rule).sqrt())
            } else {
                Ok(it.next().unwrap())
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub q: i32,
    pub norm: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub piece: String,
    pub r: f64,
    /// Normalisation exponent `3/r + theta - 3` (or with gamma).
    pub exponent: f64,
    pub rows: Vec<NormRow>,
    /// Shells skipped because their grid would exceed the point budget.
    pub skipped: Vec<i32>,
    /// max/min of the normalised values.
    pub ratio: f64,
}

/// `lambda_{q_j}^{3/r + theta - 3} ‖piece_j‖_r` for every shell that can be evaluated.
pub fn verify_lemma_u0(
    data: &InitialData,
    r: f64,
    piece: ShellPiece,
    opt: &NormOptions,
) -> Result<NormTable> {
    norm_table(&data.params, &data.shells, r, piece, opt)
}

pub(crate) fn norm_table(
    p: &ConstructionParams,
    shells: &[ShellData],
    r: f64,
    piece: ShellPiece,
    opt: &NormOptions,
) -> Result<NormTable> {
    let weight = match piece {
        ShellPiece::B => p.gamma_or_err()?,
        _ => p.theta,
    };
    let exponent = 3.0 / r + weight - 3.0;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for s in shells {
        let f = piece.of(s);
        if f.is_empty() {
            return Err(LabError::InvalidParameter(format!(
                "piece {} is absent from this construction",
                piece.label()
            )));
        }
        match piece_norms(f, &[r], opt) {
            Ok(v) => rows.push(NormRow {
                q: s.q,
                norm: v[0],
                normalized: lambda(s.q).powf(exponent) * v[0],
            }),
            Err(LabError::SupportBudget { .. }) => skipped.push(s.q),
            Err(e) => return Err(e),
        }
    }
    let vals: Vec<f64> = rows.iter().map(|r| r.normalized).collect();
    let max = vals.iter().cloned().fold(f64::NAN, f64::max);
    let min = vals.iter().cloned().fold(f64::NAN, f64::min);
    Ok(NormTable {
        piece: piece.label().to_string(),
        r,
        exponent,
        rows,
        skipped,
        ratio: max / min,
    })
}

impl NormTable {
    /// Fitted `log2 ‖piece‖_r` against `q`, first shell dropped.
    pub fn slope(&self) -> Result<LineFit> {
        let q: Vec<i32> = self.rows.iter().map(|r| r.q).collect();
        let v: Vec<f64> = self.rows.iter().map(|r| r.norm).collect();
        log2_slope_after_first(&q, &v)
    }

    /// Predicted slope `3 - weight - 3/r`.
    pub fn predicted_slope(&self) -> f64 {
        -self.exponent
    }
}

/// Shell data for consecutive indices `qs` (not a lacunary sequence), used for
/// scaling scans where the lacunary shells are too far apart to synthesise.
pub fn block_family(p: &ConstructionParams, qs: &[i32]) -> Result<Vec<ShellData>> {
    p.validate()?;
    let gamma = match p.mode {
        Mode::Mhd => Some(p.gamma_or_err()?),
        Mode::Nse => None,
    };
    qs.iter()
        .enumerate()
        .map(|(j, &q)| {
            let blocks = build_blocks(j, q, p.c)?;
            let (psi1, psi2) = synthesize_psi(&blocks)?;
            let wt = lambda(q).powf(-p.theta);
            Ok(ShellData {
                j,
                q,
                u_top: psi1.scaled(wt),
                u_low: psi2.scaled(wt),
                b: gamma.map(|g| psi2.scaled(lambda(q).powf(-g))).unwrap_or_default(),
                blocks,
                psi1,
                psi2,
            })
        })
        .collect()
}

/// Norm table for a consecutive block family.
pub fn family_norm_table(
    p: &ConstructionParams,
    qs: &[i32],
    r: f64,
    piece: ShellPiece,
    opt: &NormOptions,
) -> Result<NormTable> {
    norm_table(p, &block_family(p, qs)?, r, piece, opt)
}
