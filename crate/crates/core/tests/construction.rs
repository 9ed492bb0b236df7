mod common;

use common::rel;
use lab_core::construction::{
    block_family, block_l, block_m, build_initial, family_norm_table, lacunary_sequence, verify_lemma_u0,
    ConstructionParams, NormOptions, ShellPiece,
};
use lab_core::littlewood_paley::{lambda, project_shell};
use lab_core::spectral::{GridSpec, ModeSource, TORUS_VOLUME};
use lab_core::LabError;

#[test]
fn lacunary_sequences() {
    let seq = |p: ConstructionParams| lacunary_sequence(&p).unwrap();
    assert_eq!(seq(ConstructionParams::nse(2.0, 3, 4)), vec![3, 6, 12, 24]);
    assert_eq!(seq(ConstructionParams::mhd(2.0, 2.0, 3, 3)), vec![3, 6, 12]);
    assert_eq!(seq(ConstructionParams::nse(1.8, 3, 3)), vec![3, 11, 41]);
    assert_eq!(seq(ConstructionParams::nse(1.9, 3, 4)), vec![3, 8, 21, 56]);
}

#[test]
fn sequences_satisfy_the_gap_condition() {
    for (theta, j) in [(1.75, 2), (1.8, 3), (1.9, 4), (2.0, 4)] {
        let s = lacunary_sequence(&ConstructionParams::nse(theta, 3, j)).unwrap();
        for w in s.windows(2) {
            assert!(w[1] as f64 * (2.0 * theta - 3.0) >= w[0] as f64 * (4.0 - theta) - 1e-9);
            assert!(w[1] > w[0]);
        }
    }
}

#[test]
fn invalid_parameters_rejected() {
    for p in [
        ConstructionParams::nse(1.5, 3, 2),
        ConstructionParams::nse(1.4, 3, 2),
        ConstructionParams::nse(2.1, 3, 2),
        ConstructionParams::mhd(2.0, 1.5, 3, 2),
        ConstructionParams::mhd(2.0, 2.1, 3, 2),
    ] {
        assert!(matches!(build_initial(&p), Err(LabError::InvalidParameter(_))), "{p:?}");
    }
    let mut p = ConstructionParams::mhd(2.0, 2.0, 3, 2);
    p.gamma = None;
    assert!(build_initial(&p).is_err());
}

#[test]
fn block_counts_at_q4() {
    let l = block_l(4, 0.125);
    let m = block_m(4, 0.125);
    assert_eq!((l.lo, l.hi), ([16, -2, -2], [18, 2, 2]));
    assert_eq!((m.lo, m.hi), ([-1, -1, 8], [1, 1, 9]));
    assert_eq!(l.count(), 75);
    assert_eq!(m.count(), 18);
    let n = l.sum(&m);
    assert_eq!(n.count(), 5 * 7 * 6);
}

#[test]
fn low_first_shell_fails_integrity() {
    let r = build_initial(&ConstructionParams::nse(2.0, 2, 2));
    assert!(matches!(r, Err(LabError::ConstructionIntegrity(_))), "{r:?}");
}

#[test]
fn data_is_real_and_solenoidal() {
    let d = build_initial(&ConstructionParams::mhd(2.0, 2.0, 3, 2)).unwrap();
    for f in d.fields() {
        let s = f.to_sparse(1 << 24).unwrap();
        s.check_hermitian().unwrap();
        assert!(s.divergence_residual() < 1e-12);
        assert!(!s.is_empty());
    }
    let u0 = d.u0.to_sparse(1 << 24).unwrap();
    let s = &d.shells[0];
    let wt = lambda(s.q).powf(-2.0);
    let at = |k: [i64; 3]| u0.get(&k).copied().unwrap();
    for k in [s.blocks.l.lo, s.blocks.l.hi] {
        let want = project([0.0, 1.0, 0.0], k);
        for i in 0..3 {
            assert!((at(k)[i].re - wt * want[i]).abs() < 1e-15 && at(k)[i].im == 0.0);
        }
    }
    let kn = s.blocks.n.lo;
    let want = project([-1.0, 1.0, 0.0], kn);
    for i in 0..3 {
        assert!(at(kn)[i].re == 0.0 && (at(kn)[i].im - wt * want[i]).abs() < 1e-15);
    }
}

fn project(d: [f64; 3], k: [i64; 3]) -> [f64; 3] {
    let kf = k.map(|c| c as f64);
    let k2: f64 = kf.iter().map(|c| c * c).sum();
    let kd: f64 = (0..3).map(|i| kf[i] * d[i]).sum();
    [0, 1, 2].map(|i| d[i] - kf[i] * kd / k2)
}

fn box_energy(lo: [i64; 3], hi: [i64; 3], d: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            for z in lo[2]..=hi[2] {
                s += project(d, [x, y, z]).iter().map(|c| c * c).sum::<f64>();
            }
        }
    }
    s
}

#[test]
fn energy_matches_parseval_on_the_lattice() {
    let d = build_initial(&ConstructionParams::nse(2.0, 3, 2)).unwrap();
    let s = d.u0.to_sparse(1 << 24).unwrap();
    // u0 = sum_j λ^{-θ} (psi1 + psi2); the boxes and their negatives are disjoint.
    let mut want = 0.0;
    for sh in &d.shells {
        let w2 = lambda(sh.q).powf(-4.0);
        let b = &sh.blocks;
        want += 2.0
            * w2
            * (box_energy(b.l.lo, b.l.hi, [0.0, 1.0, 0.0])
                + box_energy(b.n.lo, b.n.hi, [-1.0, 1.0, 0.0])
                + box_energy(b.m.lo, b.m.hi, [1.0, 0.0, 0.0]));
    }
    assert!(rel(s.energy(), TORUS_VOLUME * want) < 1e-12, "{} vs {}", s.energy(), TORUS_VOLUME * want);
    let rule = lab_core::lattice::SumRule::exact();
    assert!(rel(d.u0.l2_norm_sq(&rule), TORUS_VOLUME * want) < 1e-12);
}

#[test]
fn shell_identity_on_a_grid() {
    let d = build_initial(&ConstructionParams::nse(2.0, 3, 2)).unwrap();
    assert_eq!(d.seq, vec![3, 6]);
    let g = GridSpec::new(160).unwrap();
    assert!(d.extent() <= g.kmax());
    let u0 = d.u0.to_sparse(g.len() as u128).unwrap().to_dense(g).unwrap();
    for s in &d.shells {
        let want = s.u_top.to_sparse(g.len() as u128).unwrap().to_dense(g).unwrap();
        let got = project_shell(&u0, s.q).unwrap();
        assert!(got.sub(&want).unwrap().max_abs() <= 1e-12 * want.max_abs());
    }
    assert!(project_shell(&u0, 7).unwrap().max_abs() <= 1e-14);
    assert!(project_shell(&u0, 4).unwrap().max_abs() <= 1e-14);
    let grid = d.on_grid(g).unwrap();
    assert!(rel(grid.u0.energy(), d.u0.to_sparse(1 << 24).unwrap().energy()) < 1e-12);
}

#[test]
fn coarse_grid_reports_resolution() {
    let d = build_initial(&ConstructionParams::nse(2.0, 3, 2)).unwrap();
    let r = d.on_grid(GridSpec::new(64).unwrap());
    assert!(matches!(r, Err(LabError::Resolution { .. })), "{r:?}");
}

#[test]
fn l2_scaling_of_top_pieces() {
    let theta = 2.0;
    let p = ConstructionParams::nse(theta, 3, 4);
    let opt = NormOptions::default();
    let t = family_norm_table(&p, &[4, 5, 6, 7, 8, 9], 2.0, ShellPiece::UTop, &opt).unwrap();
    let slope = t.slope().unwrap().slope;
    assert!((slope - (1.5 - theta)).abs() <= 0.2, "slope {slope}");
    assert!(t.ratio <= 4.0);
    let lac = verify_lemma_u0(&build_initial(&p).unwrap(), 2.0, ShellPiece::UTop, &opt).unwrap();
    assert_eq!(lac.rows.len(), 4);
    assert!(lac.ratio <= 4.0);
    assert!((lac.slope().unwrap().slope - (1.5 - theta)).abs() <= 0.2);
}

#[test]
fn magnetic_sup_norm_scaling() {
    let gamma = 2.0;
    let p = ConstructionParams::mhd(2.0, gamma, 3, 3);
    let t = family_norm_table(&p, &[6, 7, 8, 9], f64::INFINITY, ShellPiece::B, &NormOptions::default()).unwrap();
    let slope = t.slope().unwrap().slope;
    assert!((slope - (3.0 - gamma)).abs() <= 0.3, "slope {slope}");
    assert!(t.ratio <= 4.0);
    assert!((t.predicted_slope() - (3.0 - gamma)).abs() < 1e-12);
}

#[test]
fn energy_increments_are_summable() {
    let p = ConstructionParams::nse(1.8, 3, 3);
    let shells = block_family(&p, &[4, 5, 6, 7, 8]).unwrap();
    let e: Vec<f64> = shells
        .iter()
        .map(|s| s.u_top.to_sparse(1 << 24).unwrap().energy() + s.u_low.to_sparse(1 << 24).unwrap().energy())
        .collect();
    for w in e.windows(2) {
        // ‖U_q‖² ~ λ^{3 - 2θ}; successive shells shrink by roughly 2^{-0.6}.
        let r = w[1] / w[0];
        assert!(r > 0.4 && r < 0.9, "ratio {r}");
    }
}

#[test]
fn extent_covers_all_supports() {
    let d = build_initial(&ConstructionParams::nse(2.0, 3, 3)).unwrap();
    let top = d.shells.last().unwrap();
    assert_eq!(d.extent(), top.blocks.n.hi[0].max(top.blocks.n.hi[2]));
    assert_eq!(ModeSource::extent(&d.u0)[0], d.extent());
}
