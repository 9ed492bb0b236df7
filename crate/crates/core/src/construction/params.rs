use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "NSE", alias = "nse")]
    Nse,
    #[serde(rename = "MHD", alias = "mhd")]
    Mhd,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Nse => "NSE",
            Mode::Mhd => "MHD",
        })
    }
}

fn default_c() -> f64 {
    0.125
}

fn default_q1() -> i32 {
    3
}

/// Largest shell index representable with 64-bit lattice coordinates.
pub const MAX_SHELL: i32 = 58;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub mode: Mode,
    pub theta: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_q1")]
    pub q1: i32,
    #[serde(rename = "J")]
    pub j_count: usize,
    /// Adds the `psi2` velocity at weight `lambda^{-theta}` to the MHD velocity.
    #[serde(default)]
    pub mhd_velocity_includes_psi2: bool,
}

impl ConstructionParams {
    pub fn nse(theta: f64, q1: i32, j_count: usize) -> Self {
        Self {
            mode: Mode::Nse,
            theta,
            gamma: None,
            c: default_c(),
            q1,
            j_count,
            mhd_velocity_includes_psi2: false,
        }
    }

    pub fn mhd(theta: f64, gamma: f64, q1: i32, j_count: usize) -> Self {
        Self {
            mode: Mode::Mhd,
            gamma: Some(gamma),
            ..Self::nse(theta, q1, j_count)
        }
    }

    pub fn gamma_or_err(&self) -> Result<f64> {
        self.gamma
            .ok_or_else(|| LabError::InvalidParameter("MHD mode requires gamma".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.theta;
        if !(t > 1.5 && t <= 2.0) {
            return Err(LabError::InvalidParameter(format!(
                "condition 3/2 < theta <= 2 violated (theta={t})"
            )));
        }
        if self.mode == Mode::Mhd {
            let g = self.gamma_or_err()?;
            if !(g > 1.5) {
                return Err(LabError::InvalidParameter(format!(
                    "condition gamma > 3/2 violated (gamma={g})"
                )));
            }
            if t + g > 4.0 {
                return Err(LabError::InvalidParameter(format!(
                    "condition theta + gamma <= 4 violated (theta+gamma={})",
                    t + g
                )));
            }
        }
        if !(self.c > 0.0 && self.c <= 0.125) {
            return Err(LabError::InvalidParameter(format!(
                "condition 0 < c <= 1/8 violated (c={})",
                self.c
            )));
        }
        if self.q1 < 2 {
            return Err(LabError::InvalidParameter(format!(
                "first shell q1={} must be >= 2",
                self.q1
            )));
        }
        if self.j_count < 1 {
            return Err(LabError::InvalidParameter("J must be >= 1".into()));
        }
        Ok(())
    }
}

/// Smallest integer `m > q` with `m * den >= q * num`, robust to rounding.
fn next_index(q: i32, num: f64, den: f64) -> Result<i32> {
    if den <= 0.0 {
        return Err(LabError::InvalidParameter(format!(
            "lacunary exponent denominator {den} is not positive"
        )));
    }
    let target = q as f64 * num;
    let tol = 1e-9 * (target.abs() + 1.0);
    let mut m = ((target / den).floor() as i32 - 1).max(q + 1);
    while (m as f64) * den < target - tol {
        m += 1;
    }
    Ok(m)
}

/// Increasing shell indices `q_1 < q_2 < ...` of the lacunary construction.
pub fn lacunary_sequence(p: &ConstructionParams) -> Result<Vec<i32>> {
    p.validate()?;
    let t = p.theta;
    let mut seq = vec![p.q1];
    while seq.len() < p.j_count {
        let q = *seq.last().unwrap();
        let mut m = next_index(q, 4.0 - t, 2.0 * t - 3.0)?;
        if p.mode == Mode::Mhd {
            let g = p.gamma_or_err()?;
            m = m.max(next_index(q, 4.0 - t, 2.0 * g - 3.0)?);
            m = m.max(next_index(q, 4.0 - g, t + g - 3.0)?);
        }
        if m > MAX_SHELL {
            return Err(LabError::InvalidParameter(format!(
                "shell index {m} exceeds the supported maximum {MAX_SHELL}"
            )));
        }
        seq.push(m);
    }
    Ok(seq)
}
