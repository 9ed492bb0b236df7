use std::collections::HashMap;

use num_complex::Complex64;

use super::sum::Accumulator;
use super::TrilinearValue;
use crate::error::{LabError, Result};
use crate::spectral::{SparseField, Vec3c, TORUS_VOLUME};

/// Default limit on enumerated support pairs.
pub const DEFAULT_PAIR_BUDGET: u128 = 5_000_000;

fn lookup(f: &SparseField) -> HashMap<[i64; 3], Vec3c> {
    f.iter().map(|(k, v)| (*k, *v)).collect()
}

fn term(uk: &Vec3c, vm: &Vec3c, n: [i64; 3], wn: &Vec3c) -> Complex64 {
    let uw = uk[0] * wn[0] + uk[1] * wn[1] + uk[2] * wn[2];
    let nv = vm[0] * n[0] as f64 + vm[1] * n[1] as f64 + vm[2] * n[2] as f64;
    uw * nv * Complex64::i()
}

/// `B(u, v, w) = (2π)^3 sum_{k+m+n=0} û_j(k) v̂_i(m) (i n_i) ŵ_j(n)`, exactly.
///
/// The two smallest supports are enumerated and the third coefficient is looked up.
pub fn trilinear_sparse(u: &SparseField, v: &SparseField, w: &SparseField) -> Result<TrilinearValue> {
    trilinear_sparse_with_budget(u, v, w, DEFAULT_PAIR_BUDGET)
}

pub fn trilinear_sparse_with_budget(
    u: &SparseField,
    v: &SparseField,
    w: &SparseField,
    budget: u128,
) -> Result<TrilinearValue> {
    for f in [u, v, w] {
        f.check_hermitian()?;
    }
    let (nu, nv, nw) = (u.len() as u128, v.len() as u128, w.len() as u128);
    let work = (nu * nw).min(nu * nv).min(nv * nw);
    if work > budget {
        return Err(LabError::SupportBudget { work, budget });
    }
    let mut acc = Accumulator::default();
    if work == nu * nw {
        let vm = lookup(v);
        for (k, uk) in u.iter() {
            for (n, wn) in w.iter() {
                let m = [-k[0] - n[0], -k[1] - n[1], -k[2] - n[2]];
                if let Some(vv) = vm.get(&m) {
                    acc.push(term(uk, vv, *n, wn));
                }
            }
        }
    } else if work == nu * nv {
        let wm = lookup(w);
        for (k, uk) in u.iter() {
            for (m, vv) in v.iter() {
                let n = [-k[0] - m[0], -k[1] - m[1], -k[2] - m[2]];
                if let Some(wn) = wm.get(&n) {
                    acc.push(term(uk, vv, n, wn));
                }
            }
        }
    } else {
        let um = lookup(u);
        for (m, vv) in v.iter() {
            for (n, wn) in w.iter() {
                let k = [-m[0] - n[0], -m[1] - n[1], -m[2] - n[2]];
                if let Some(uk) = um.get(&k) {
                    acc.push(term(uk, vv, *n, wn));
                }
            }
        }
    }
    Ok(TrilinearValue::from_acc(&acc, Complex64::new(TORUS_VOLUME, 0.0)))
}
