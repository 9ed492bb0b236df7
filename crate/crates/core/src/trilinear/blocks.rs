use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::Accumulator;
use super::TrilinearValue;
use crate::construction::{BlockField, BlockPiece};
use crate::error::{LabError, Result};
use crate::lattice::{clip_triple, polygon_count, polygon_node_bound, polygon_nodes, SumRule, TriNode};
use crate::spectral::{leray_real, TORUS_VOLUME};

/// How lattice sums over block triples are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockRule {
    /// Every lattice triple enumerated.
    Exact,
    /// Lattice-sum quadrature throughout.
    Quadrature(SumRule),
    /// Exact when a block triple has at most `exact_limit` lattice triples.
    Auto { exact_limit: u128, rule: SumRule },
}

impl Default for BlockRule {
    fn default() -> Self {
        BlockRule::Auto {
            exact_limit: 4_000_000,
            rule: SumRule::quadrature(),
        }
    }
}

/// Largest number of nodes evaluated for a single block triple.
pub const DEFAULT_NODE_BUDGET: u128 = 200_000_000;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `sum w (P(k)a · P(n)c)(n · P(m)b)` over the tensor product of per-axis nodes.
fn triple_sum(a: [f64; 3], b: [f64; 3], c: [f64; 3], nodes: &[Vec<TriNode>; 3]) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = nodes[0]
        .par_iter()
        .map(|n0| {
            let mut acc = Accumulator::default();
            for n1 in &nodes[1] {
                let mut s = 0.0;
                let mut sa = 0.0;
                for n2 in &nodes[2] {
                    let k = [n0.x[0], n1.x[0], n2.x[0]];
                    let m = [n0.x[1], n1.x[1], n2.x[1]];
                    let n = [n0.x[2], n1.x[2], n2.x[2]];
                    let pa = leray_real(k, a);
                    let pc = leray_real(n, c);
                    let pb = leray_real(m, b);
                    let f = n2.w * dot(pa, pc) * dot(n, pb);
                    s += f;
                    sa += f.abs();
                }
                let w = n0.w * n1.w;
                acc.push_raw(Complex64::new(w * s, 0.0));
                acc.abs_add(w.abs() * sa);
            }
            (acc.value().re, acc.abs_sum())
        })
        .collect();
    let mut acc = Accumulator::default();
    let mut abs = 0.0;
    for (v, a) in parts {
        acc.push_raw(Complex64::new(v, 0.0));
        abs += a;
    }
    (acc.value().re, abs)
}

fn intervals(a: &BlockPiece, b: &BlockPiece, c: &BlockPiece, d: usize) -> [(i64, i64); 3] {
    [a.bx.interval(d), b.bx.interval(d), c.bx.interval(d)]
}

/// `B(u, v, w)` for block fields, summed triple by triple over their pieces.
pub fn trilinear_blocks(
    u: &BlockField,
    v: &BlockField,
    w: &BlockField,
    rule: &BlockRule,
    node_budget: u128,
) -> Result<TrilinearValue> {
    let mut acc = Accumulator::default();
    for pa in &u.pieces {
        for pb in &v.pieces {
            for pc in &w.pieces {
                let iv = [0, 1, 2].map(|d| intervals(pa, pb, pc, d));
                if iv.iter().any(|t| clip_triple(*t).is_none()) {
                    continue;
                }
                let r = match rule {
                    BlockRule::Exact => SumRule::exact(),
                    BlockRule::Quadrature(r) => *r,
                    BlockRule::Auto { exact_limit, rule } => {
                        let count = iv
                            .iter()
                            .map(|t| polygon_count(*t))
                            .try_fold(1u128, |p, c| p.checked_mul(c))
                            .unwrap_or(u128::MAX);
                        if count <= *exact_limit {
                            SumRule::exact()
                        } else {
                            *rule
                        }
                    }
                };
                let work = iv
                    .iter()
                    .map(|t| polygon_node_bound(&r, *t))
                    .try_fold(1u128, |p, c| p.checked_mul(c))
                    .unwrap_or(u128::MAX);
                if work > node_budget {
                    return Err(LabError::SupportBudget {
                        work,
                        budget: node_budget,
                    });
                }
                let nodes = iv.map(|t| polygon_nodes(&r, t));
                let (s, abs) = triple_sum(pa.dir, pb.dir, pc.dir, &nodes);
                let pref = Complex64::i() * pa.amp * pb.amp * pc.amp * TORUS_VOLUME;
                acc.push_raw(pref * s);
                acc.abs_add(pref.norm() * abs);
            }
        }
    }
    Ok(TrilinearValue::from_acc(&acc, Complex64::new(1.0, 0.0)))
}
