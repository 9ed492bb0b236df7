mod common;

use std::f64::consts::PI;

use common::{c, random_field, rel};
use lab_core::construction::{block_family, ConstructionParams};
use lab_core::littlewood_paley::{
    bernstein_ratio, besov_norm, chi, lambda, phi, project_shell, project_tilde, shell_symbol, BesovParams,
};
use lab_core::spectral::{leray_apply, GridSpec, SpectralField};
use lab_core::LabError;
use proptest::prelude::*;

fn single_mode(g: GridSpec, k: [i64; 3]) -> SpectralField {
    let v = leray_apply(k, &[c(0.3, 0.1), c(-0.2, 0.4), c(0.5, 0.0)]);
    let mut f = SpectralField::zeros(g);
    f.set(k, v).unwrap();
    f.set([-k[0], -k[1], -k[2]], v.map(|z| z.conj())).unwrap();
    f
}

#[test]
fn profile_support_and_plateau() {
    for i in 0..=3000 {
        let t = i as f64 * 1e-3;
        assert!((0.0..=1.0).contains(&chi(t)));
        assert!(phi(t) >= 0.0);
        if t <= 0.75 {
            assert_eq!(chi(t), 1.0);
            assert_eq!(phi(t), 0.0);
        }
        if t >= 1.0 {
            assert_eq!(chi(t), 0.0);
        }
        if (1.0..=1.5).contains(&t) {
            assert_eq!(phi(t), 1.0);
        }
        if t >= 2.0 {
            assert_eq!(phi(t), 0.0);
        }
    }
}

#[test]
fn partition_of_unity_on_radii() {
    for i in 0..=200_000 {
        let r = i as f64 * 1e-2;
        let s: f64 = (-1..=14).map(|q| shell_symbol(q, r)).sum();
        assert!((s - 1.0).abs() <= 1e-12, "r={r}: {s}");
    }
}

#[test]
fn plateau_mode_passes_and_distant_shell_kills() {
    let g = GridSpec::new(16).unwrap();
    let f = single_mode(g, [4, 0, 0]);
    assert_eq!(project_shell(&f, 2).unwrap(), f);
    assert_eq!(project_shell(&f, 4).unwrap().max_abs(), 0.0);
    assert_eq!(project_tilde(&f, 2).unwrap(), f);
    assert!(matches!(project_shell(&f, -2), Err(LabError::InvalidParameter(_))));
    assert!(project_tilde(&f, -1).is_err());
}

#[test]
fn tilde_is_identity_on_three_shells() {
    let g = GridSpec::new(32).unwrap();
    let f = random_field(g, 15, 5, true);
    // A field supported where shells 1..=3 tile the radius.
    let band = f.map_symbol(|k| {
        let r = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        shell_symbol(1, r) + shell_symbol(2, r) + shell_symbol(3, r)
    });
    let narrowed = project_shell(&band, 2).unwrap();
    let t = project_tilde(&narrowed, 2).unwrap();
    assert!(t.sub(&narrowed).unwrap().max_abs() <= 1e-15);
}

#[test]
fn besov_closed_form() {
    let g = GridSpec::new(8).unwrap();
    let p = BesovParams { s: 0.0, r: 2.0, l: f64::INFINITY };
    assert_eq!(besov_norm(&SpectralField::zeros(g), &p).unwrap(), 0.0);
    let mut f = SpectralField::zeros(g);
    f.set([1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    f.set([-1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(rel(besov_norm(&f, &p).unwrap(), (2.0 * PI).powf(1.5) / 2f64.sqrt()) < 1e-13);
    assert!(besov_norm(&f, &BesovParams { s: 0.0, r: 2.0, l: 0.5 }).is_err());
}

#[test]
fn bernstein_single_modes() {
    let g = GridSpec::new(32).unwrap();
    let f = single_mode(g, [4, 0, 0]);
    assert!(rel(bernstein_ratio(&f, 2, 2.0).unwrap(), 1.0) < 1e-13);
    let f = single_mode(g, [6, 0, 0]);
    assert!(rel(bernstein_ratio(&f, 2, 2.0).unwrap(), 1.5) < 1e-13);
    assert!(matches!(bernstein_ratio(&f, 5, 2.0), Err(LabError::UndefinedRatio(5))));
}

#[test]
fn bernstein_on_constructed_blocks() {
    let p = ConstructionParams::nse(2.0, 3, 1);
    let shells = block_family(&p, &[4]).unwrap();
    let s = &shells[0];
    let g = GridSpec::new(48).unwrap();
    let u = s.u_top.to_sparse(1 << 20).unwrap().to_dense(g).unwrap();
    for p in [2.0, f64::INFINITY] {
        let r = bernstein_ratio(&u, s.q, p).unwrap();
        assert!((0.25..=4.0).contains(&r), "p={p}: {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shells_sum_to_field(seed in 0u64..1000) {
        let g = GridSpec::new(32).unwrap();
        let f = random_field(g, 15, seed, false);
        let mut sum = SpectralField::zeros(g);
        for q in -1..=5 {
            sum.axpy(1.0, &project_shell(&f, q).unwrap()).unwrap();
        }
        let err = sum.sub(&f).unwrap().energy().sqrt();
        prop_assert!(err <= 1e-12 * f.energy().sqrt());
    }

    #[test]
    fn distant_shells_are_orthogonal(seed in 0u64..1000, p in -1i32..3, gap in 2i32..4) {
        let g = GridSpec::new(32).unwrap();
        let f = random_field(g, 15, seed, false);
        let a = project_shell(&f, p).unwrap();
        let b = project_shell(&f, p + gap).unwrap();
        let ip = a.inner(&b).unwrap().abs();
        prop_assert!(ip <= 1e-12 * (a.energy() * b.energy()).sqrt().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn besov_l2_equivalence_and_monotonicity(seed in 0u64..1000) {
        let g = GridSpec::new(16).unwrap();
        let f = random_field(g, 7, seed, false);
        let n2 = f.energy().sqrt();
        let b2 = besov_norm(&f, &BesovParams { s: 0.0, r: 2.0, l: 2.0 }).unwrap();
        prop_assert!(b2 >= n2 / 3f64.sqrt() && b2 <= n2 * 3f64.sqrt());
        let b1 = besov_norm(&f, &BesovParams { s: 0.5, r: 2.0, l: 1.0 }).unwrap();
        let b3 = besov_norm(&f, &BesovParams { s: 0.5, r: 2.0, l: 3.0 }).unwrap();
        let binf = besov_norm(&f, &BesovParams { s: 0.5, r: 2.0, l: f64::INFINITY }).unwrap();
        prop_assert!(b1 >= b3 && b3 >= binf);
        let scaled = besov_norm(&f.scaled(-2.5), &BesovParams { s: 0.5, r: 2.0, l: f64::INFINITY }).unwrap();
        prop_assert!(rel(scaled, 2.5 * binf) <= 1e-14);
    }
}

#[test]
fn single_shell_besov_matches_l2() {
    let g = GridSpec::new(32).unwrap();
    let f = single_mode(g, [0, 5, 0]);
    let b = besov_norm(&f, &BesovParams { s: 0.0, r: 2.0, l: 2.0 }).unwrap();
    assert!(rel(b, f.energy().sqrt()) <= 1e-10);
    assert_eq!(lambda(-1), 0.5);
}
