mod common;

use common::{c, random_field, rel};
use lab_core::construction::Mode;
use lab_core::solver::{
    energy_balance_residual, make_integrator, run, taylor_green, Integrator, SimState, SolverConfig, TimeStep,
};
use lab_core::spectral::{GridSpec, SpectralField};
use lab_core::LabError;
use proptest::prelude::*;

fn shear(g: GridSpec) -> SpectralField {
    // cos x1 e2
    let mut u = SpectralField::zeros(g);
    u.set([1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    u.set([-1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    u
}

fn tg_config(n: usize, t_end: f64) -> SolverConfig {
    let mut cfg = SolverConfig::new(Mode::Nse, n, 0.05, 0.05, t_end);
    cfg.probe_times = vec![];
    cfg
}

fn integrate(cfg: &SolverConfig, u: SpectralField, b: Option<SpectralField>, dt: f64, steps: usize) -> SimState {
    let mut integ = make_integrator(cfg).unwrap();
    let mut s = SimState::new(cfg.mode, u, b, cfg.mu, cfg.nu).unwrap();
    for _ in 0..steps {
        integ.step(&mut s, dt).unwrap();
    }
    s
}

#[test]
fn shear_flow_only_diffuses() {
    let g = GridSpec::new(16).unwrap();
    let u = shear(g);
    let mu = 0.3;
    let mut integ = Integrator::new(g, Mode::Nse, mu, mu);
    let s = SimState::new(Mode::Nse, u.clone(), None, mu, mu).unwrap();
    let (du, db) = integ.rhs(&s).unwrap();
    assert!(db.is_none());
    assert!(du.sub(&u.scaled(-mu)).unwrap().max_abs() < 1e-15);
    let t = integ.nonlinear(&u, None).unwrap();
    assert!(t.u.max_abs() < 1e-15);
    assert!((t.max_speed - 1.0).abs() < 1e-12);
}

#[test]
fn nonlinearity_is_energy_neutral() {
    let g = GridSpec::new(16).unwrap();
    let u = random_field(g, 5, 3, true);
    let b = random_field(g, 5, 4, true);
    let mut integ = Integrator::new(g, Mode::Mhd, 0.1, 0.1);
    let t = integ.nonlinear(&u, Some(&b)).unwrap();
    let tb = t.b.unwrap();
    let scale = t.u.inner(&t.u).unwrap().sqrt() * u.energy().sqrt();
    let sum = t.u.inner(&u).unwrap() + tb.inner(&b).unwrap();
    assert!(sum.abs() < 1e-12 * scale, "{sum} at scale {scale}");
    assert!(t.u.divergence_residual() < 1e-12);
    assert!(tb.divergence_residual() < 1e-12);
}

#[test]
fn aliasing_breaks_neutrality_without_the_mask() {
    let g = GridSpec::new(16).unwrap();
    let u = random_field(g, 7, 11, true);
    let mut on = Integrator::new(g, Mode::Nse, 0.1, 0.1);
    let mut off = Integrator::new(g, Mode::Nse, 0.1, 0.1);
    off.set_dealias(false);
    let e = u.energy();
    let defect = |i: &mut Integrator| {
        let t = i.nonlinear(&u, None).unwrap();
        t.u.inner(&u).unwrap().abs() / (t.u.inner(&t.u).unwrap().sqrt() * e.sqrt())
    };
    assert!(defect(&mut on) < 1e-12);
    assert!(defect(&mut off) > 1e-6);
}

#[test]
fn pure_diffusion_is_exact() {
    let g = GridSpec::new(16).unwrap();
    let u0 = random_field(g, 7, 5, true);
    let mut cfg = tg_config(16, 1.0);
    cfg.nonlinear = false;
    cfg.mu = 0.02;
    let (dt, steps) = (0.1, 10);
    let s = integrate(&cfg, u0.clone(), None, dt, steps);
    let t = dt * steps as f64;
    let want = u0.map_symbol(|k| (-cfg.mu * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64 * t).exp());
    assert!(s.u.sub(&want).unwrap().max_abs() <= 1e-14 * u0.max_abs());
    assert!((s.t - t).abs() < 1e-12);
}

#[test]
fn taylor_green_energy_balance() {
    let mut cfg = tg_config(16, 0.5);
    cfg.record_every = 5;
    let out = run(&cfg, SimState::new(Mode::Nse, taylor_green(GridSpec::new(16).unwrap(), 1.0), None, 0.05, 0.05).unwrap(), None).unwrap();
    let r = energy_balance_residual(&out.history).unwrap();
    assert!(r < 1e-8, "residual {r}");
    let e: Vec<f64> = out.history.records.iter().map(|r| r.energy_u).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]));
    assert!(rel(e[0], 2.0 * std::f64::consts::PI.powi(3)) < 1e-12);
    assert!(out.summary.max_cfl <= cfg.cfl_limit);
}

#[test]
fn fourth_order_convergence() {
    let g = GridSpec::new(16).unwrap();
    let u0 = taylor_green(g, 1.0);
    let cfg = tg_config(16, 0.4);
    let reference = integrate(&cfg, u0.clone(), None, 0.4 / 64.0, 64);
    let err = |steps: usize| {
        let s = integrate(&cfg, u0.clone(), None, 0.4 / steps as f64, steps);
        s.u.sub(&reference.u).unwrap().max_abs()
    };
    let (e1, e2) = (err(4), err(8));
    let order = (e1 / e2).log2();
    assert!((3.5..4.6).contains(&order), "observed order {order} ({e1:.3e}, {e2:.3e})");
}

#[test]
fn zero_magnetic_field_stays_zero() {
    let g = GridSpec::new(16).unwrap();
    let mut cfg = tg_config(16, 0.2);
    cfg.mode = Mode::Mhd;
    let s = integrate(&cfg, taylor_green(g, 1.0), None, 0.02, 10);
    assert_eq!(s.b.as_ref().unwrap().max_abs(), 0.0);
    let nse = integrate(&tg_config(16, 0.2), taylor_green(g, 1.0), None, 0.02, 10);
    assert!(s.u.sub(&nse.u).unwrap().max_abs() < 1e-14);
}

#[test]
fn oversized_step_rejected_without_side_effects() {
    let g = GridSpec::new(32).unwrap();
    let cfg = tg_config(32, 1.0);
    let mut integ = make_integrator(&cfg).unwrap();
    let mut s = SimState::new(Mode::Nse, taylor_green(g, 1.0), None, 0.05, 0.05).unwrap();
    let before = s.clone();
    let r = integ.step(&mut s, 1.0);
    assert!(matches!(r, Err(LabError::StepRejected { .. })), "{r:?}");
    assert_eq!(s, before);
    let mut fixed = cfg.clone();
    fixed.dt = TimeStep::Fixed(1.0);
    assert!(matches!(run(&fixed, before, None), Err(LabError::StepRejected { .. })));
}

#[test]
fn probes_are_hit_exactly() {
    let g = GridSpec::new(16).unwrap();
    let mut cfg = tg_config(16, 0.3);
    cfg.dt = TimeStep::Fixed(0.04);
    cfg.record_every = 1000;
    cfg.probe_times = vec![0.013, 0.1, 0.25];
    let out = run(&cfg, SimState::new(Mode::Nse, taylor_green(g, 1.0), None, 0.05, 0.05).unwrap(), None).unwrap();
    let ts: Vec<f64> = out.history.records.iter().map(|r| r.t).collect();
    assert_eq!(ts, vec![0.0, 0.013, 0.1, 0.25, 0.3]);
    assert_eq!(out.state.t, 0.3);
}

#[test]
fn invalid_configs_rejected() {
    let g = GridSpec::new(16).unwrap();
    let s = SimState::new(Mode::Nse, taylor_green(g, 1.0), None, 0.05, 0.05).unwrap();
    for f in [
        |c: &mut SolverConfig| c.mu = 0.0,
        |c: &mut SolverConfig| c.t_end = -1.0,
        |c: &mut SolverConfig| c.dt = TimeStep::Fixed(0.0),
        |c: &mut SolverConfig| c.tracked_shells = vec![-2],
    ] {
        let mut cfg = tg_config(16, 0.1);
        f(&mut cfg);
        assert!(matches!(run(&cfg, s.clone(), None), Err(LabError::InvalidParameter(_))));
    }
    let cfg = tg_config(32, 0.1);
    assert!(matches!(run(&cfg, s, None), Err(LabError::GridMismatch)));
}

#[test]
fn nse_state_rejects_magnetic_field() {
    let g = GridSpec::new(8).unwrap();
    let u = random_field(g, 2, 1, true);
    let r = SimState::new(Mode::Nse, u.clone(), Some(u), 0.1, 0.1);
    assert!(matches!(r, Err(LabError::InvalidParameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn steps_preserve_invariants(seed in any::<u64>()) {
        let g = GridSpec::new(16).unwrap();
        let mut cfg = tg_config(16, 1.0);
        cfg.mode = Mode::Mhd;
        let u = random_field(g, 5, seed, true);
        let b = random_field(g, 5, seed.wrapping_add(1), true);
        let s = integrate(&cfg, u, Some(b), 0.002, 3);
        s.check().unwrap();
        prop_assert!(s.u.divergence_residual() < 1e-12);
        prop_assert!(s.b.as_ref().unwrap().divergence_residual() < 1e-12);
    }
}
