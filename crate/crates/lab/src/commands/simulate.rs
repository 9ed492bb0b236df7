use lab_core::construction::{build_initial, Mode};
use lab_core::littlewood_paley::{project_tilde, BesovParams};
use lab_core::solver::{
    energy_balance_residual, make_integrator, run, shell_productions, taylor_green, Reference, SimHistory, SimState,
};
use lab_core::spectral::snapshot::write_svf;
use lab_core::spectral::{norm3, SparseField, SpectralField, TORUS_VOLUME};
use lab_core::trilinear::trilinear_sparse;
use lab_core::{LabError, Result};
use serde::Serialize;
use serde_json::json;

use super::{attempt, Prepared};
use crate::config::{construction_condition, InitialSpec, SimulateConfig};
use crate::store::Check;
use crate::{Artifact, Outcome};

pub fn prepare(cfg: SimulateConfig) -> Prepared {
    Prepared::new(&cfg.clone(), move || compute(&cfg))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductionCheck {
    pub q: i32,
    pub field: &'static str,
    pub solver: f64,
    pub sparse: f64,
    /// Scale of the sparse sum: its absolute term sum, or an `l1` bound when zero.
    pub scale: f64,
    pub rel_error: f64,
}

/// `(2π)^3 Σ|û| Σ|v̂| Σ|k||ŵ|`, an upper bound for `|B(u, v, w)|`.
fn l1_bound(u: &SparseField, v: &SparseField, w: &SparseField) -> f64 {
    let l1 = |f: &SparseField| f.iter().map(|(_, c)| norm3(c)).sum::<f64>();
    let k1: f64 = w
        .iter()
        .map(|(k, c)| ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt() * norm3(c))
        .sum();
    TORUS_VOLUME * l1(u) * l1(v) * k1
}

/// Relative difference against the sparse sum's own scale, or against the
/// `l1` bound when the sparse sum has no nonzero terms.
fn rel(a: f64, b: f64, scale: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / scale.max(f64::MIN_POSITIVE)
    }
}

/// Shell productions of the solver at the initial state against the sparse evaluator.
pub fn production_cross_check(cfg: &SimulateConfig, s: &SimState) -> Result<Vec<ProductionCheck>> {
    let mut integ = make_integrator(&cfg.solver)?;
    let qs = &cfg.solver.tracked_shells;
    let prods = shell_productions(&mut integ, s, qs)?;
    let u = s.u.to_sparse();
    let b = s.b.as_ref().map(SpectralField::to_sparse);
    let mut out = Vec::new();
    for (&q, (pu, pb)) in qs.iter().zip(prods) {
        let ut = project_tilde(&s.u, q)?.to_sparse();
        let a = trilinear_sparse(&u, &u, &ut)?;
        let (mut val, mut scale) = (a.value, a.abs_sum);
        let mut bound = l1_bound(&u, &u, &ut);
        if let Some(b) = &b {
            let m = trilinear_sparse(b, b, &ut)?;
            val -= m.value;
            scale += m.abs_sum;
            bound += l1_bound(b, b, &ut);
        }
        if scale == 0.0 {
            scale = bound;
        }
        out.push(ProductionCheck {
            q,
            field: "u",
            solver: pu,
            sparse: val,
            scale,
            rel_error: rel(pu, val, scale.max(val.abs())),
        });
        if let (Some(b), Some(pb), Some(bf)) = (&b, pb, &s.b) {
            let bt = project_tilde(bf, q)?.to_sparse();
            let x = trilinear_sparse(b, &u, &bt)?;
            let y = trilinear_sparse(&u, b, &bt)?;
            let val = x.value - y.value;
            let mut scale = x.abs_sum + y.abs_sum;
            if scale == 0.0 {
                scale = l1_bound(b, &u, &bt) + l1_bound(&u, b, &bt);
            }
            out.push(ProductionCheck {
                q,
                field: "b",
                solver: pb,
                sparse: val,
                scale,
                rel_error: rel(pb, val, scale.max(val.abs())),
            });
        }
    }
    Ok(out)
}

/// Second-order derivative at `t[1]` from three unevenly spaced samples.
fn derivative3(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    -h2 / (h1 * (h1 + h2)) * f[0] + (h2 - h1) / (h1 * h2) * f[1] + h1 / (h2 * (h1 + h2)) * f[2]
}

/// `max |dE_q/dt - (2 P_q - 2 D_q)| / max |2 P_q - 2 D_q|` over interior records,
/// for the `u` (and `b`) shell energies of tracked shell `idx`.
pub fn shell_budget_error(h: &SimHistory, idx: usize) -> Option<(f64, Option<f64>)> {
    let r = &h.records;
    if r.len() < 3 || r[0].shells.len() <= idx {
        return None;
    }
    let budget = |e: &dyn Fn(usize) -> f64, rhs: &dyn Fn(usize) -> f64| {
        let mut err = 0.0f64;
        let mut size = 0.0f64;
        for k in 1..r.len() - 1 {
            let d = derivative3([r[k - 1].t, r[k].t, r[k + 1].t], [e(k - 1), e(k), e(k + 1)]);
            err = err.max((d - rhs(k)).abs());
            size = size.max(rhs(k).abs());
        }
        if err == 0.0 {
            0.0
        } else {
            err / size
        }
    };
    let sh = |k: usize| &r[k].shells[idx];
    let eu = budget(&|k| sh(k).energy_u, &|k| 2.0 * sh(k).production_u - 2.0 * sh(k).dissipation_u);
    let eb = (h.mode == Mode::Mhd).then(|| {
        budget(&|k| sh(k).energy_b.unwrap_or(0.0), &|k| {
            2.0 * sh(k).production_b.unwrap_or(0.0) - 2.0 * sh(k).dissipation_b.unwrap_or(0.0)
        })
    });
    Some((eu, eb))
}

fn initial_state(cfg: &SimulateConfig) -> std::result::Result<(SimState, Option<Reference>), crate::Failure> {
    let sc = &cfg.solver;
    let grid = sc.grid()?;
    if sc.t_end <= 0.0 {
        return Err(LabError::InvalidParameter("t_end must be positive".into()).into());
    }
    match &cfg.initial {
        InitialSpec::Construction { construction } => {
            if let Some(f) = construction_condition(construction) {
                return Err(f);
            }
            if construction.mode != sc.mode {
                return Err(LabError::InvalidParameter(format!(
                    "construction mode {} differs from solver mode {}",
                    construction.mode, sc.mode
                ))
                .into());
            }
            let data = build_initial(construction)?;
            let gd = data.on_grid(grid)?;
            let s = SimState::from_data(sc.mode, &gd, sc.mu, sc.nu)?;
            let reference = sc.besov.map(|b| {
                let sb = |w: f64| b.s.unwrap_or(3.0 / b.r + w - 3.0);
                Reference {
                    besov_u: BesovParams {
                        s: sb(construction.theta),
                        r: b.r,
                        l: f64::INFINITY,
                    },
                    besov_b: construction.gamma.map(|g| BesovParams {
                        s: sb(g),
                        r: b.r,
                        l: f64::INFINITY,
                    }),
                    data: gd.clone(),
                }
            });
            Ok((s, reference))
        }
        InitialSpec::TaylorGreen { amplitude } => {
            let s = SimState::new(sc.mode, taylor_green(grid, *amplitude), None, sc.mu, sc.nu)?;
            Ok((s, None))
        }
    }
}

pub fn compute(cfg: &SimulateConfig) -> Outcome {
    let mut out = Outcome::default();
    attempt!(out, cfg.solver.validate());
    let (s0, reference) = match initial_state(cfg) {
        Ok(v) => v,
        Err(f) => return Outcome::failed(f),
    };
    attempt!(out, s0.check());

    let cross = if matches!(cfg.initial, InitialSpec::Construction { .. }) {
        let v = attempt!(out, production_cross_check(cfg, &s0));
        for c in &v {
            out.checks.push(
                Check::at_most(format!("production:{}:q{}", c.field, c.q), c.rel_error, cfg.production_tolerance)
                    .with_detail(format!("solver {:.6e} sparse {:.6e}", c.solver, c.sparse)),
            );
        }
        v
    } else {
        vec![]
    };

    let res = attempt!(out, run(&cfg.solver, s0, reference.as_ref()));
    let residual = attempt!(out, energy_balance_residual(&res.history));
    out.checks.push(Check::at_most("energy_balance", residual, cfg.balance_tolerance));
    out.checks.push(Check::flag("final_state_invariants", res.state.check().is_ok()));

    let mut budgets = Vec::new();
    for (i, &q) in cfg.solver.tracked_shells.iter().enumerate() {
        if let Some((eu, eb)) = shell_budget_error(&res.history, i) {
            out.checks.push(Check::at_most(format!("shell_budget:u:q{q}"), eu, cfg.budget_tolerance));
            if let Some(eb) = eb {
                out.checks.push(Check::at_most(format!("shell_budget:b:q{q}"), eb, cfg.budget_tolerance));
            }
            budgets.push(json!({ "q": q, "u": eu, "b": eb }));
        }
    }

    let mut csv = Vec::new();
    attempt!(out, res.history.write_csv(&mut csv));
    out.artifacts.push(Artifact::Bytes("history.csv".into(), csv));
    out.artifacts.push(Artifact::json("history.json", &res.history));
    let summary = json!({
        "run": res.summary,
        "energy_balance_residual": residual,
        "production_cross_check": cross,
        "shell_budget": budgets,
        "final": { "t": res.state.t, "energy_u": res.state.energy_u(), "energy_b": res.state.energy_b() },
    });
    out.artifacts.push(Artifact::json("summary.json", &summary));
    if cfg.snapshots {
        for (name, f) in [("u.svf", Some(&res.state.u)), ("b.svf", res.state.b.as_ref())] {
            if let Some(f) = f {
                let mut buf = Vec::new();
                attempt!(out, write_svf(&mut buf, f));
                out.artifacts.push(Artifact::Bytes(name.into(), buf));
            }
        }
    }
    out.numbers = json!({ "summary": summary, "history": res.history });
    out
}
