use std::io::Write;

use serde::{Deserialize, Serialize};

use super::integrator::Integrator;
use super::state::SimState;
use crate::construction::{GridData, Mode};
use crate::error::{LabError, Result};
use crate::littlewood_paley::{besov_norm, project_tilde, BesovParams};
use crate::spectral::SpectralField;

/// `‖f̃_q‖₂²`.
pub fn shell_energy(f: &SpectralField, q: i32) -> Result<f64> {
    Ok(project_tilde(f, q)?.energy())
}

/// `visc ‖∇f̃_q‖₂²`.
pub fn shell_dissipation(f: &SpectralField, q: i32, visc: f64) -> Result<f64> {
    Ok(visc * project_tilde(f, q)?.gradient_energy())
}

/// Nonlinear input to shells `qs`: `(B(u,u,ũ_q) - B(b,b,ũ_q), B(b,u,b̃_q) - B(u,b,b̃_q))`,
/// formed as the pairing of the dealiased tendencies with the shell projections.
pub fn shell_productions(
    integ: &mut Integrator,
    s: &SimState,
    qs: &[i32],
) -> Result<Vec<(f64, Option<f64>)>> {
    let t = integ.nonlinear_terms(&s.u, s.b.as_ref())?;
    qs.iter()
        .map(|&q| {
            let pu = t.u.inner(&project_tilde(&s.u, q)?)?;
            let pb = match (&t.b, &s.b) {
                (Some(nb), Some(b)) => Some(nb.inner(&project_tilde(b, q)?)?),
                _ => None,
            };
            Ok((pu, pb))
        })
        .collect()
}

pub fn shell_production(integ: &mut Integrator, s: &SimState, q: i32) -> Result<(f64, Option<f64>)> {
    Ok(shell_productions(integ, s, &[q])?[0])
}

/// Besov distances of `u` and `b` to the initial data.
pub fn besov_distance(
    s: &SimState,
    data: &GridData,
    pu: &BesovParams,
    pb: Option<&BesovParams>,
) -> Result<(f64, Option<f64>)> {
    if data.u0.grid() != s.grid {
        return Err(LabError::GridMismatch);
    }
    let du = besov_norm(&s.u.sub(&data.u0)?, pu)?;
    let db = match (&s.b, &data.b0, pb) {
        (Some(b), Some(b0), Some(p)) => Some(besov_norm(&b.sub(b0)?, p)?),
        (Some(b), None, Some(p)) => Some(besov_norm(b, p)?),
        _ => None,
    };
    Ok((du, db))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellRecord {
    pub q: i32,
    pub energy_u: f64,
    pub energy_b: Option<f64>,
    pub production_u: f64,
    pub production_b: Option<f64>,
    /// `mu ‖∇ũ_q‖²`
    pub dissipation_u: f64,
    pub dissipation_b: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub step: usize,
    pub t: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    /// `E(t) = ∫₀ᵗ ‖∇u‖² ds`
    pub diss_u: f64,
    /// `E_b(t) = ∫₀ᵗ nu ‖∇b‖² ds`
    pub diss_b: f64,
    pub shells: Vec<ShellRecord>,
    pub besov_u: Option<f64>,
    pub besov_b: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimHistory {
    pub mode: Mode,
    pub mu: f64,
    pub nu: f64,
    pub records: Vec<Record>,
}

impl SimHistory {
    pub fn new(mode: Mode, mu: f64, nu: f64) -> Self {
        Self { mode, mu, nu, records: vec![] }
    }

    pub fn push(&mut self, r: Record) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(r.t > last.t) {
                return Err(LabError::InvalidParameter(format!(
                    "history timestamps must increase ({} after {})",
                    r.t, last.t
                )));
            }
        }
        self.records.push(r);
        Ok(())
    }

    /// `‖u‖² + ‖b‖² + 2(mu E + E_b)` at each record.
    pub fn balance(&self, r: &Record) -> f64 {
        r.energy_u + r.energy_b + 2.0 * (self.mu * r.diss_u + r.diss_b)
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        let shells: Vec<i32> = self
            .records
            .first()
            .map(|r| r.shells.iter().map(|s| s.q).collect())
            .unwrap_or_default();
        let mut head = vec!["t".to_string(), "E_u".into(), "E_b".into(), "diss_u".into(), "diss_b".into()];
        for q in &shells {
            for name in ["shell_E_u", "shell_E_b", "prod_u", "prod_b", "shell_diss_u", "shell_diss_b"] {
                head.push(format!("{name}_q{q}"));
            }
        }
        head.push("besov_u".into());
        head.push("besov_b".into());
        writeln!(w, "{}", head.join(","))?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.17e}"));
        for r in &self.records {
            let mut row = vec![
                format!("{:.17e}", r.t),
                format!("{:.17e}", r.energy_u),
                format!("{:.17e}", r.energy_b),
                format!("{:.17e}", r.diss_u),
                format!("{:.17e}", r.diss_b),
            ];
            for s in &r.shells {
                row.push(format!("{:.17e}", s.energy_u));
                row.push(opt(s.energy_b));
                row.push(format!("{:.17e}", s.production_u));
                row.push(opt(s.production_b));
                row.push(format!("{:.17e}", s.dissipation_u));
                row.push(opt(s.dissipation_b));
            }
            row.push(opt(r.besov_u));
            row.push(opt(r.besov_b));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `max_t |LHS(t) - RHS| / RHS` for the energy equality of the Galerkin system.
pub fn energy_balance_residual(h: &SimHistory) -> Result<f64> {
    let first = h.records.first().ok_or(LabError::InsufficientData { got: 0, required: 1 })?;
    let rhs = first.energy_u + first.energy_b;
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(h.records
        .iter()
        .map(|r| (h.balance(r) - h.balance(first)).abs() / rhs)
        .fold(0.0, f64::max))
}
