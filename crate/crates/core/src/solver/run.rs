use serde::{Deserialize, Serialize};

use super::config::{SolverConfig, TimeStep};
use super::diagnostics::{
    besov_distance, shell_dissipation, shell_energy, shell_productions, Record, ShellRecord, SimHistory,
};
use super::integrator::Integrator;
use super::state::SimState;
use crate::construction::GridData;
use crate::error::{LabError, Result};
use crate::littlewood_paley::BesovParams;
use crate::spectral::{to_spectral, GridSpec, PhysicalField, SpectralField};

/// Initial data and norms against which Besov distances are measured.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub data: GridData,
    pub besov_u: BesovParams,
    pub besov_b: Option<BesovParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    pub dt: f64,
    pub max_cfl: f64,
    pub t_end: f64,
}

pub struct RunOutput {
    pub history: SimHistory,
    pub state: SimState,
    pub summary: RunSummary,
}

pub fn make_integrator(cfg: &SolverConfig) -> Result<Integrator> {
    let mut integ = Integrator::new(cfg.grid()?, cfg.mode, cfg.mu, cfg.nu);
    integ.set_dealias(cfg.dealias);
    integ.set_nonlinear(cfg.nonlinear);
    integ.set_cfl_limit(cfg.cfl_limit);
    Ok(integ)
}

/// The step size a config asks for, given the initial state.
pub fn choose_dt(cfg: &SolverConfig, integ: &mut Integrator, s: &SimState) -> Result<f64> {
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => {
            let v = if cfg.nonlinear { integ.max_speed(s)? } else { 0.0 };
            if v > 0.0 {
                cfg.cfl_safety * cfg.cfl_limit / (v * integ.cfl_kmax())
            } else {
                cfg.t_end / 100.0
            }
        }
    };
    Ok(dt.min(cfg.t_end))
}

fn record(
    integ: &mut Integrator,
    s: &SimState,
    step: usize,
    diss: (f64, f64),
    shells: &[i32],
    reference: Option<&Reference>,
) -> Result<Record> {
    let prods = shell_productions(integ, s, shells)?;
    let mut out = Vec::with_capacity(shells.len());
    for (&q, (pu, pb)) in shells.iter().zip(prods) {
        out.push(ShellRecord {
            q,
            energy_u: shell_energy(&s.u, q)?,
            energy_b: s.b.as_ref().map(|b| shell_energy(b, q)).transpose()?,
            production_u: pu,
            production_b: pb,
            dissipation_u: shell_dissipation(&s.u, q, s.mu)?,
            dissipation_b: s.b.as_ref().map(|b| shell_dissipation(b, q, s.nu)).transpose()?,
        });
    }
    let (besov_u, besov_b) = match reference {
        Some(r) => {
            let (du, db) = besov_distance(s, &r.data, &r.besov_u, r.besov_b.as_ref())?;
            (Some(du), db)
        }
        None => (None, None),
    };
    Ok(Record {
        step,
        t: s.t,
        energy_u: s.energy_u(),
        energy_b: s.energy_b(),
        diss_u: diss.0,
        diss_b: diss.1,
        shells: out,
        besov_u,
        besov_b,
    })
}

/// Integrates to `cfg.t_end`, landing exactly on probe times, recording every
/// `record_every` steps and at each probe.
pub fn run(cfg: &SolverConfig, init: SimState, reference: Option<&Reference>) -> Result<RunOutput> {
    cfg.validate()?;
    let mut integ = make_integrator(cfg)?;
    let mut s = init;
    if s.grid.n() != cfg.grid_n {
        return Err(LabError::GridMismatch);
    }
    let dt = choose_dt(cfg, &mut integ, &s)?;
    let mut targets: Vec<f64> = cfg
        .probe_times
        .iter()
        .copied()
        .filter(|&t| t > s.t && t < cfg.t_end)
        .collect();
    targets.push(cfg.t_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let e0 = s.energy_u() + s.energy_b();
    let mut hist = SimHistory::new(s.mode, s.mu, s.nu);
    let mut diss = (0.0, 0.0);
    let mut step = 0usize;
    let mut max_cfl = 0.0f64;
    hist.push(record(&mut integ, &s, step, diss, &cfg.tracked_shells, reference)?)?;
    for &target in &targets {
        loop {
            let left = target - s.t;
            if left <= 1e-12 * target.max(1.0) {
                break;
            }
            // Avoid a sliver step just before a target.
            let h = if left < dt * (1.0 + 1e-9) { left } else { dt };
            let info = integ.step(&mut s, h).map_err(|e| match e {
                LabError::BlowUp { t, what } if t.is_nan() => LabError::BlowUp { t: s.t, what },
                e => e,
            })?;
            if (target - s.t).abs() <= 1e-12 * target.max(1.0) {
                s.t = target;
            }
            step += 1;
            max_cfl = max_cfl.max(info.cfl);
            diss.0 += info.diss_u;
            diss.1 += info.diss_b;
            let e = s.energy_u() + s.energy_b();
            if !e.is_finite() || e > 1e12 * e0.max(f64::MIN_POSITIVE) {
                return Err(LabError::BlowUp {
                    t: s.t,
                    what: format!("energy {e:.3e} against initial {e0:.3e}"),
                });
            }
            let at_target = s.t == target;
            if at_target || step % cfg.record_every == 0 {
                hist.push(record(&mut integ, &s, step, diss, &cfg.tracked_shells, reference)?)?;
            }
        }
    }
    Ok(RunOutput {
        history: hist,
        state: s,
        summary: RunSummary {
            steps: step,
            dt,
            max_cfl,
            t_end: cfg.t_end,
        },
    })
}

/// `amp (sin x cos y cos z, -cos x sin y cos z, 0)`, solenoidal with `‖u‖² = 2π³ amp²`.
pub fn taylor_green(grid: GridSpec, amp: f64) -> SpectralField {
    let p = PhysicalField::from_fn(grid, |[x, y, z]| {
        [amp * x.sin() * y.cos() * z.cos(), -amp * x.cos() * y.sin() * z.cos(), 0.0]
    });
    to_spectral(&p)
}
