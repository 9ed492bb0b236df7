use serde::{Deserialize, Serialize};

use super::blocks::{trilinear_blocks, BlockRule, DEFAULT_NODE_BUDGET};
use crate::construction::{BlockField, InitialData, Mode};
use crate::error::{LabError, Result};
use crate::fit::log2_slope_after_first;
use crate::littlewood_paley::lambda;

pub const SLOPE_TOLERANCE: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaRow {
    /// `B(u0, u0, U_q)` with the full velocity `psi1 + psi2`.
    VelocityFull,
    /// `B(u0b, u0b, U_q)` with the MHD velocity.
    VelocityMhd,
    /// `B(b0, b0, U_q)`
    MagMagVel,
    /// `B(u0b, b0, B_q)`
    VelMagMag,
    /// `B(b0, u0b, B_q)`
    MagVelMag,
}

impl LemmaRow {
    pub fn label(self) -> &'static str {
        match self {
            LemmaRow::VelocityFull => "B(u0,u0,U_q)",
            LemmaRow::VelocityMhd => "B(u0b,u0b,U_q)",
            LemmaRow::MagMagVel => "B(b0,b0,U_q)",
            LemmaRow::VelMagMag => "B(u0b,b0,B_q)",
            LemmaRow::MagVelMag => "B(b0,u0b,B_q)",
        }
    }

    pub fn predicted_exponent(self, theta: f64, gamma: Option<f64>) -> f64 {
        match self {
            LemmaRow::VelocityFull | LemmaRow::VelocityMhd => 7.0 - 3.0 * theta,
            _ => 7.0 - 2.0 * gamma.unwrap_or(f64::NAN) - theta,
        }
    }

    pub fn rows_for(mode: Mode) -> &'static [LemmaRow] {
        match mode {
            Mode::Nse => &[LemmaRow::VelocityFull],
            Mode::Mhd => &[
                LemmaRow::VelocityFull,
                LemmaRow::VelocityMhd,
                LemmaRow::MagMagVel,
                LemmaRow::VelMagMag,
                LemmaRow::MagVelMag,
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrilOptions {
    pub rule: BlockRule,
    pub node_budget: u128,
}

impl Default for TrilOptions {
    fn default() -> Self {
        Self {
            rule: BlockRule::default(),
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellValue {
    pub q: i32,
    pub value: f64,
    pub abs_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrilinearReport {
    pub label: String,
    pub predicted_exponent: f64,
    pub shells: Vec<ShellValue>,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    pub pass: bool,
    /// Sign of each shell value (0 for an exact zero).
    pub signs: Vec<i8>,
    pub sign_alternates: bool,
    pub note: Option<String>,
}

/// Velocity `sum_j lambda^{-theta} (psi1 + psi2)`, whatever the mode.
fn full_velocity(data: &InitialData) -> BlockField {
    let th = data.params.theta;
    BlockField::sum(
        data.shells
            .iter()
            .flat_map(|s| [s.psi1.scaled(lambda(s.q).powf(-th)), s.psi2.scaled(lambda(s.q).powf(-th))])
            .collect::<Vec<_>>()
            .iter(),
    )
}

fn operands<'a>(
    data: &'a InitialData,
    row: LemmaRow,
    j: usize,
    full: &'a BlockField,
) -> Result<(&'a BlockField, &'a BlockField, &'a BlockField)> {
    let s = &data.shells[j];
    let b0 = || {
        data.b0
            .as_ref()
            .ok_or_else(|| LabError::InvalidParameter("row needs MHD data".into()))
    };
    Ok(match row {
        LemmaRow::VelocityFull => (full, full, &s.u_top),
        LemmaRow::VelocityMhd => (&data.u0, &data.u0, &s.u_top),
        LemmaRow::MagMagVel => (b0()?, b0()?, &s.u_top),
        LemmaRow::VelMagMag => (&data.u0, b0()?, &s.b),
        LemmaRow::MagVelMag => (b0()?, &data.u0, &s.b),
    })
}

pub fn evaluate_row(data: &InitialData, row: LemmaRow, opt: &TrilOptions) -> Result<TrilinearReport> {
    if data.shells.len() < 3 {
        return Err(LabError::InsufficientData {
            got: data.shells.len(),
            required: 3,
        });
    }
    let full = full_velocity(data);
    let mut shells = Vec::new();
    for j in 0..data.shells.len() {
        let (u, v, w) = operands(data, row, j, &full)?;
        let t = trilinear_blocks(u, v, w, &opt.rule, opt.node_budget)?;
        shells.push(ShellValue {
            q: data.shells[j].q,
            value: t.value,
            abs_sum: t.abs_sum,
        });
    }
    let predicted = row.predicted_exponent(data.params.theta, data.params.gamma);
    let qs: Vec<i32> = shells.iter().map(|s| s.q).collect();
    let vals: Vec<f64> = shells.iter().map(|s| s.value).collect();
    let signs: Vec<i8> = vals
        .iter()
        .map(|v| if *v > 0.0 { 1 } else if *v < 0.0 { -1 } else { 0 })
        .collect();
    let tail = &signs[1..];
    let sign_alternates = tail.windows(2).any(|w| w[0] != w[1]);
    let (slope, residual, note) = match log2_slope_after_first(&qs, &vals) {
        Ok(f) => (Some(f.slope), Some(f.residual), None),
        Err(e) => (None, None, Some(format!("no slope: {e}"))),
    };
    let pass = slope.is_some_and(|s| (s - predicted).abs() <= SLOPE_TOLERANCE);
    Ok(TrilinearReport {
        label: row.label().to_string(),
        predicted_exponent: predicted,
        shells,
        slope,
        residual,
        pass,
        signs,
        sign_alternates,
        note,
    })
}

/// One report per lemma row applicable to the data's mode.
pub fn verify_lemma_tril(data: &InitialData, opt: &TrilOptions) -> Result<Vec<TrilinearReport>> {
    LemmaRow::rows_for(data.params.mode)
        .iter()
        .map(|&r| evaluate_row(data, r, opt))
        .collect()
}

/// Split of `B(u0, u0, U_{q_j})` into higher-shell, shell-local and lower-shell parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub q: i32,
    pub total: f64,
    /// `sum_{k > j} B(Ũ_k, Ũ_k, U_j)`
    pub high: f64,
    /// `B(U_{q_j - 1}, U_{q_j}, U_{q_j})`
    pub local: f64,
    /// `B(U_{q_j}, U_{q_j}, U_{<= q_{j-1}})`
    pub low: f64,
}

impl Decomposition {
    pub fn local_fraction(&self) -> f64 {
        self.local / self.total
    }
}

/// Decomposition of the velocity row at shell ordinal `j` (full velocity).
pub fn nse_decomposition(data: &InitialData, j: usize, opt: &TrilOptions) -> Result<Decomposition> {
    let full = full_velocity(data);
    let th = data.params.theta;
    let tilde: Vec<BlockField> = data
        .shells
        .iter()
        .map(|s| BlockField::sum([&s.psi1, &s.psi2]).scaled(lambda(s.q).powf(-th)))
        .collect();
    let s = &data.shells[j];
    let low_part = s.psi2.scaled(lambda(s.q).powf(-th));
    let b = |u: &BlockField, v: &BlockField, w: &BlockField| -> Result<f64> {
        Ok(trilinear_blocks(u, v, w, &opt.rule, opt.node_budget)?.value)
    };
    let total = b(&full, &full, &s.u_top)?;
    let mut high = 0.0;
    for t in &tilde[j + 1..] {
        high += b(t, t, &s.u_top)?;
    }
    let local = b(&low_part, &s.u_top, &s.u_top)?;
    let below = BlockField::sum(tilde[..j].iter());
    let low = if below.is_empty() {
        0.0
    } else {
        b(&s.u_top, &s.u_top, &below)?
    };
    Ok(Decomposition {
        q: s.q,
        total,
        high,
        local,
        low,
    })
}
