mod common;

use std::f64::consts::PI;

use common::{c, random_field, rel};
use lab_core::construction::{block_family, build_initial, BlockField, ConstructionParams};
use lab_core::trilinear::{
    evaluate_row, trilinear_blocks, trilinear_grid, trilinear_sparse, trilinear_sparse_with_budget, BlockRule,
    LemmaRow, TrilOptions, DEFAULT_NODE_BUDGET,
};
use lab_core::spectral::{GridSpec, SpectralField, TORUS_VOLUME};
use lab_core::LabError;
use num_complex::Complex64;
use proptest::prelude::*;

/// Dense triple loop over every `(k, m)` on the grid with `n = -k - m`.
fn brute_force(u: &SpectralField, v: &SpectralField, w: &SpectralField) -> f64 {
    let g = u.grid();
    let mut s = Complex64::default();
    for ik in 0..g.len() {
        let k = g.wavevector(ik);
        let uk = u.get(k);
        for im in 0..g.len() {
            let m = g.wavevector(im);
            let n = [-k[0] - m[0], -k[1] - m[1], -k[2] - m[2]];
            if !g.in_band(n) {
                continue;
            }
            let vm = v.get(m);
            let wn = w.get(n);
            let uw = uk[0] * wn[0] + uk[1] * wn[1] + uk[2] * wn[2];
            let nv = vm[0] * n[0] as f64 + vm[1] * n[1] as f64 + vm[2] * n[2] as f64;
            s += uw * nv * Complex64::i();
        }
    }
    assert!(s.im.abs() < 1e-12 * s.norm().max(1e-300));
    TORUS_VOLUME * s.re
}

#[test]
fn sparse_matches_dense_oracle() {
    let g = GridSpec::new(8).unwrap();
    for seed in 0..4 {
        let u = random_field(g, 3, 10 + seed, true);
        let v = random_field(g, 3, 20 + seed, seed % 2 == 0);
        let w = random_field(g, 3, 30 + seed, true);
        let want = brute_force(&u, &v, &w);
        let got = trilinear_sparse(&u.to_sparse(), &v.to_sparse(), &w.to_sparse()).unwrap();
        assert!((got.value - want).abs() <= 1e-12 * got.abs_sum, "{} vs {want}", got.value);
        assert!(got.imag.abs() <= 1e-12 * got.abs_sum);
    }
}

#[test]
fn grid_quadrature_matches_sparse() {
    let g = GridSpec::new(12).unwrap();
    for seed in 0..3 {
        let u = random_field(g, 5, 40 + seed, true);
        let v = random_field(g, 5, 50 + seed, true);
        let w = random_field(g, 5, 60 + seed, true);
        let s = trilinear_sparse(&u.to_sparse(), &v.to_sparse(), &w.to_sparse()).unwrap();
        let q = trilinear_grid(&u, &v, &w, g).unwrap();
        assert!((q - s.value).abs() <= 1e-10 * s.abs_sum, "{q} vs {}", s.value);
    }
}

#[test]
fn hand_triad() {
    // u = cos x1 cos x2 e3, v = cos x2 e1, w = sin x1 e3: B = ∫ cos^2 x1 cos^2 x2 = 2π^3.
    let g = GridSpec::new(8).unwrap();
    let mut u = SpectralField::zeros(g);
    for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        u.set([a, b, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)]).unwrap();
    }
    let mut v = SpectralField::zeros(g);
    v.set([0, 1, 0], [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    v.set([0, -1, 0], [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    let mut w = SpectralField::zeros(g);
    w.set([1, 0, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5)]).unwrap();
    w.set([-1, 0, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.5)]).unwrap();
    let want = 2.0 * PI.powi(3);
    let s = trilinear_sparse(&u.to_sparse(), &v.to_sparse(), &w.to_sparse()).unwrap();
    assert!(rel(s.value, want) < 1e-14, "{}", s.value);
    assert!(rel(trilinear_grid(&u, &v, &w, g).unwrap(), want) < 1e-12);
    assert!(rel(brute_force(&u, &v, &w), want) < 1e-14);
}

#[test]
fn out_of_band_rejected_by_grid() {
    let g = GridSpec::new(16).unwrap();
    let u = random_field(g, 7, 1, true);
    let small = GridSpec::new(8).unwrap();
    assert!(matches!(trilinear_grid(&u, &u, &u, small), Err(LabError::Resolution { .. })));
}

#[test]
fn non_hermitian_rejected() {
    let g = GridSpec::new(8).unwrap();
    let mut u = SpectralField::zeros(g);
    u.set([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let s = u.to_sparse();
    assert!(matches!(trilinear_sparse(&s, &s, &s), Err(LabError::SymmetryViolation { .. })));
}

#[test]
fn pair_budget_enforced() {
    let g = GridSpec::new(12).unwrap();
    let u = random_field(g, 5, 2, true).to_sparse();
    let r = trilinear_sparse_with_budget(&u, &u, &u, 10);
    assert!(matches!(r, Err(LabError::SupportBudget { .. })), "{r:?}");
}

#[test]
fn block_sums_match_sparse_on_small_data() {
    let p = ConstructionParams::mhd(2.0, 2.0, 3, 3);
    let shells = block_family(&p, &[3, 4, 5]).unwrap();
    let u = BlockField::sum(shells.iter().flat_map(|s| [&s.u_top, &s.u_low]));
    let b = BlockField::sum(shells.iter().map(|s| &s.b));
    let sp = |f: &BlockField| f.to_sparse(1 << 24).unwrap();
    let (su, sb) = (sp(&u), sp(&b));
    let mut nonzero = 0;
    for s in &shells {
        let (top, bq) = (sp(&s.u_top), sp(&s.b));
        for (x, y, z, bx, by, bz) in [
            (&su, &su, &top, &u, &u, &s.u_top),
            (&su, &sb, &bq, &u, &b, &s.b),
            (&sb, &sb, &top, &b, &b, &s.u_top),
            (&sb, &su, &bq, &b, &u, &s.b),
        ] {
            let want = trilinear_sparse_with_budget(x, y, z, 1 << 26).unwrap();
            let scale = want.abs_sum.max(1e-300);
            let exact = trilinear_blocks(bx, by, bz, &BlockRule::Exact, DEFAULT_NODE_BUDGET).unwrap();
            assert!((exact.value - want.value).abs() <= 1e-12 * scale, "{} vs {}", exact.value, want.value);
            let quad = trilinear_blocks(bx, by, bz, &BlockRule::default(), DEFAULT_NODE_BUDGET).unwrap();
            assert!((quad.value - want.value).abs() <= 1e-12 * scale);
            if want.value.abs() > 1e-6 * scale {
                nonzero += 1;
            }
        }
    }
    assert!(nonzero >= 3, "{nonzero}");
}

#[test]
fn lemma_needs_three_shells() {
    let d = build_initial(&ConstructionParams::nse(2.0, 3, 2)).unwrap();
    let r = evaluate_row(&d, LemmaRow::VelocityFull, &TrilOptions::default());
    assert!(matches!(r, Err(LabError::InsufficientData { got: 2, required: 3 })), "{r:?}");
}

#[test]
fn velocity_row_is_real_and_nonzero() {
    let d = build_initial(&ConstructionParams::nse(2.0, 3, 3)).unwrap();
    let r = evaluate_row(&d, LemmaRow::VelocityFull, &TrilOptions::default()).unwrap();
    assert_eq!(r.shells.len(), 3);
    assert!(r.shells.iter().all(|s| s.value != 0.0 && s.value.abs() <= s.abs_sum));
    assert!(r.slope.is_some());
    assert!((r.predicted_exponent - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn vanishes_on_repeated_argument(seed in any::<u64>()) {
        let g = GridSpec::new(8).unwrap();
        let v = random_field(g, 3, seed, true).to_sparse();
        let w = random_field(g, 3, seed ^ 0x9e37, false).to_sparse();
        let t = trilinear_sparse(&w, &v, &w).unwrap();
        prop_assert!(t.value.abs() <= 1e-12 * t.abs_sum.max(1e-300));
    }

    #[test]
    fn antisymmetric_in_outer_arguments(seed in any::<u64>()) {
        let g = GridSpec::new(8).unwrap();
        let u = random_field(g, 3, seed, false).to_sparse();
        let v = random_field(g, 3, seed.wrapping_add(1), true).to_sparse();
        let w = random_field(g, 3, seed.wrapping_add(2), false).to_sparse();
        let a = trilinear_sparse(&u, &v, &w).unwrap();
        let b = trilinear_sparse(&w, &v, &u).unwrap();
        prop_assert!((a.value + b.value).abs() <= 1e-12 * (a.abs_sum + b.abs_sum));
    }

    #[test]
    fn linear_in_each_argument(seed in any::<u64>(), s in -3.0f64..3.0) {
        let g = GridSpec::new(8).unwrap();
        let u = random_field(g, 3, seed, true);
        let v = random_field(g, 3, seed.wrapping_add(7), true);
        let w = random_field(g, 3, seed.wrapping_add(9), true);
        let base = trilinear_sparse(&u.to_sparse(), &v.to_sparse(), &w.to_sparse()).unwrap();
        let scaled = trilinear_sparse(&u.to_sparse(), &v.scaled(s).to_sparse(), &w.to_sparse()).unwrap();
        prop_assert!((scaled.value - s * base.value).abs() <= 1e-12 * base.abs_sum * s.abs().max(1.0));
    }
}
