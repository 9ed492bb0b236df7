mod common;

use std::f64::consts::PI;

use common::{c, random_field, rel};
use lab_core::spectral::snapshot::{read_svf, write_svf};
use lab_core::spectral::{
    leray_apply, lp_norm, to_physical, to_spectral, GridSpec, PhysicalField, SpectralField, ZERO3,
};
use lab_core::LabError;
use proptest::prelude::*;

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

fn cos_x1_e2(g: GridSpec) -> SpectralField {
    let mut f = SpectralField::zeros(g);
    f.set([1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    f.set([-1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    f
}

#[test]
fn cosine_mode_synthesises_to_cosine() {
    let g = grid(8);
    let p = to_physical(&cos_x1_e2(g)).unwrap();
    let h = g.spacing();
    for (idx, v) in p.components()[1].iter().enumerate() {
        let i = idx / 64;
        assert!((v - (i as f64 * h).cos()).abs() < 1e-14);
    }
    assert!(p.components()[0].iter().chain(&p.components()[2]).all(|v| v.abs() < 1e-15));
}

#[test]
fn constant_samples_give_mean_mode() {
    let g = grid(8);
    let f = to_spectral(&PhysicalField::from_fn(g, |_| [1.0, 0.0, 0.0]));
    assert!((f.get([0, 0, 0])[0] - c(1.0, 0.0)).norm() < 1e-15);
    assert!(f.sub(&{
        let mut e = SpectralField::zeros(g);
        e.set([0, 0, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        e
    })
    .unwrap()
    .max_abs()
        < 1e-15);
}

#[test]
fn analysis_of_cosine_samples() {
    let g = grid(16);
    let f = to_spectral(&PhysicalField::from_fn(g, |[x, _, _]| [0.0, x.cos(), 0.0]));
    assert!((f.get([1, 0, 0])[1] - c(0.5, 0.0)).norm() < 1e-15);
    assert!((f.get([-1, 0, 0])[1] - c(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn non_hermitian_input_is_rejected() {
    let g = grid(8);
    let mut f = SpectralField::zeros(g);
    f.set([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(matches!(to_physical(&f), Err(LabError::SymmetryViolation { .. })));
}

#[test]
fn shape_mismatch_is_rejected() {
    let g = grid(8);
    let r = PhysicalField::new(g, [vec![0.0; 10], vec![0.0; 512], vec![0.0; 512]]);
    assert!(matches!(r, Err(LabError::ShapeMismatch { .. })));
}

#[test]
fn leray_hand_values() {
    let e1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let e2 = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
    assert!(leray_apply([1, 0, 0], &e1).iter().all(|z| z.norm() == 0.0));
    assert_eq!(leray_apply([1, 0, 0], &e2), e2);
    let v = leray_apply([1, 1, 0], &e1);
    assert!((v[0] - c(0.5, 0.0)).norm() < 1e-15);
    assert!((v[1] - c(-0.5, 0.0)).norm() < 1e-15);
    assert_eq!(v[2], c(0.0, 0.0));
}

#[test]
fn derivative_of_cosine() {
    let g = grid(8);
    let d = cos_x1_e2(g).derivative(0).unwrap();
    assert!((d.get([1, 0, 0])[1] - c(0.0, 0.5)).norm() < 1e-15);
    assert!((d.get([-1, 0, 0])[1] - c(0.0, -0.5)).norm() < 1e-15);
    assert!(matches!(d.derivative(3), Err(LabError::AxisOutOfRange(3))));
}

#[test]
fn derivative_scales_single_mode() {
    let g = grid(16);
    let mut f = SpectralField::zeros(g);
    let v = leray_apply([2, 3, 1], &[c(1.0, 0.5), c(0.0, 0.0), c(0.0, -1.0)]);
    f.set([2, 3, 1], v).unwrap();
    f.set([-2, -3, -1], v.map(|z| z.conj())).unwrap();
    let d = f.derivative(0).unwrap();
    assert!(rel(d.energy().sqrt(), 2.0 * f.energy().sqrt()) < 1e-14);
}

#[test]
fn lp_closed_forms() {
    let g = grid(8);
    assert_eq!(lp_norm(&SpectralField::zeros(g), 2.0).unwrap(), 0.0);
    let mut one = SpectralField::zeros(g);
    one.set([0, 0, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(rel(lp_norm(&one, 2.0).unwrap(), (2.0 * PI).powf(1.5)) < 1e-13);
    assert!(rel(lp_norm(&cos_x1_e2(g), 2.0).unwrap(), (2.0 * PI).powf(1.5) / 2f64.sqrt()) < 1e-13);
    assert!(matches!(lp_norm(&one, 0.5), Err(LabError::InvalidExponent(_))));
}

#[test]
fn gradient_field_has_divergence() {
    let g = grid(8);
    let mut f = SpectralField::zeros(g);
    f.set([1, 2, 0], [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
    f.set([-1, -2, 0], [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(f.divergence_residual() > 1.0);
    assert!(f.leray_project().divergence_residual() <= 1e-12);
}

#[test]
fn snapshot_round_trip() {
    let g = grid(8);
    let f = random_field(g, 3, 11, true);
    let mut buf = Vec::new();
    write_svf(&mut buf, &f).unwrap();
    assert_eq!(&buf[..4], b"SVF1");
    let (back, _) = read_svf(&mut &buf[..]).unwrap();
    assert_eq!(back, f);
    assert!(read_svf(&mut &b"XXXX"[..]).is_err());
}

#[test]
fn nyquist_plane_is_zeroed() {
    let g = grid(8);
    let mut f = random_field(g, 4, 1, false);
    f.set([4, 1, 0], [c(1.0, 0.0), ZERO3[1], ZERO3[2]]).ok();
    let d = f.derivative(1).unwrap();
    for idx in 0..g.len() {
        if g.is_nyquist(idx) {
            assert!(d.at_index(idx).iter().all(|z| z.norm() == 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_is_identity(seed in 0u64..1000) {
        let g = grid(16);
        let f = random_field(g, 7, seed, false);
        let back = to_spectral(&to_physical(&f).unwrap());
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs());
    }

    #[test]
    fn parseval(seed in 0u64..1000) {
        let g = grid(16);
        let f = random_field(g, 7, seed, false);
        let p = to_physical(&f).unwrap();
        let h3 = g.spacing().powi(3);
        let direct: f64 = (0..g.len())
            .map(|i| (0..3).map(|d| p.components()[d][i].powi(2)).sum::<f64>() * h3)
            .sum();
        prop_assert!(rel(direct, f.energy()) <= 1e-10);
    }

    #[test]
    fn leray_is_idempotent(seed in 0u64..1000) {
        let g = grid(16);
        let f = random_field(g, 7, seed, false);
        let once = f.leray_project();
        let twice = once.leray_project();
        prop_assert!(twice.sub(&once).unwrap().max_abs() <= 1e-13 * once.max_abs());
        prop_assert!(once.divergence_residual() <= 1e-12);
    }

    #[test]
    fn derivative_commutes_with_leray(seed in 0u64..1000, axis in 0usize..3) {
        let g = grid(16);
        let f = random_field(g, 7, seed, false);
        let a = f.leray_project().derivative(axis).unwrap();
        let b = f.derivative(axis).unwrap().leray_project();
        prop_assert!(a.sub(&b).unwrap().max_abs() <= 1e-13 * a.max_abs().max(1.0));
    }

    #[test]
    fn operations_preserve_hermitian_symmetry(seed in 0u64..1000, axis in 0usize..3) {
        let g = grid(16);
        let f = random_field(g, 7, seed, false);
        prop_assert_eq!(f.hermitian_defect().0, 0.0);
        prop_assert_eq!(f.leray_project().hermitian_defect().0, 0.0);
        prop_assert_eq!(f.derivative(axis).unwrap().hermitian_defect().0, 0.0);
        prop_assert!(to_physical(&f).is_ok());
    }
}
