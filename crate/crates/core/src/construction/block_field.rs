use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::blocks::IntBox;
use crate::error::{LabError, Result};
use crate::lattice::{line_nodes, SumRule};
use crate::spectral::{leray_real, ModeSource, SparseField, Vec3c, TORUS_VOLUME};

/// Coefficients `amp * P(k) dir` for every lattice point `k` of `bx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPiece {
    pub bx: IntBox,
    pub amp: Complex64,
    pub dir: [f64; 3],
}

impl BlockPiece {
    pub fn symbol(&self, k: [f64; 3]) -> [f64; 3] {
        leray_real(k, self.dir)
    }
}

/// A field given as a sum of block pieces; exact, and cheap at any frequency.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlockField {
    pub pieces: Vec<BlockPiece>,
}

impl BlockField {
    pub fn new(pieces: Vec<BlockPiece>) -> Self {
        Self { pieces }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| BlockPiece { amp: p.amp * a, ..*p })
                .collect(),
        }
    }

    pub fn extend(&mut self, other: &Self) {
        self.pieces.extend_from_slice(&other.pieces);
    }

    pub fn sum<'a>(fields: impl IntoIterator<Item = &'a BlockField>) -> Self {
        let mut out = Self::default();
        for f in fields {
            out.extend(f);
        }
        out
    }

    /// Number of stored coefficients (pieces may not overlap).
    pub fn lattice_count(&self) -> u128 {
        self.pieces.iter().map(|p| p.bx.count()).sum()
    }

    pub fn coefficient(&self, k: [i64; 3]) -> Vec3c {
        let mut v = [Complex64::default(); 3];
        let kf = k.map(|c| c as f64);
        for p in self.pieces.iter().filter(|p| p.bx.contains(k)) {
            let s = p.symbol(kf);
            for c in 0..3 {
                v[c] += p.amp * s[c];
            }
        }
        v
    }

    /// Materialises every coefficient; refuses above `budget` lattice points.
    pub fn to_sparse(&self, budget: u128) -> Result<SparseField> {
        let work = self.lattice_count();
        if work > budget {
            return Err(LabError::SupportBudget { work, budget });
        }
        let mut s = SparseField::new();
        self.for_each_mode(&mut |k, v| s.insert(k, v));
        Ok(s)
    }

    /// True when no two pieces share a lattice point.
    pub fn pieces_disjoint(&self) -> bool {
        for (i, a) in self.pieces.iter().enumerate() {
            for b in &self.pieces[i + 1..] {
                if a.bx.intersects(&b.bx) {
                    return false;
                }
            }
        }
        true
    }

    /// `‖f‖_2^2 = (2π)^3 sum_k |fhat(k)|^2`, pieces combined on box intersections.
    pub fn l2_norm_sq(&self, rule: &SumRule) -> f64 {
        let mut total = Complex64::default();
        let mut nodes: [Vec<(f64, f64)>; 3] = Default::default();
        for a in &self.pieces {
            for b in &self.pieces {
                let bx = a.bx.intersect(&b.bx);
                if bx.is_empty() {
                    continue;
                }
                for d in 0..3 {
                    nodes[d].clear();
                    line_nodes(rule, bx.lo[d], bx.hi[d], &mut nodes[d]);
                }
                let mut s = 0.0;
                for &(x, wx) in &nodes[0] {
                    for &(y, wy) in &nodes[1] {
                        for &(z, wz) in &nodes[2] {
                            let k = [x, y, z];
                            let sa = a.symbol(k);
                            let sb = b.symbol(k);
                            s += wx * wy * wz * (sa[0] * sb[0] + sa[1] * sb[1] + sa[2] * sb[2]);
                        }
                    }
                }
                total += a.amp * b.amp.conj() * s;
            }
        }
        TORUS_VOLUME * total.re
    }
}

impl ModeSource for BlockField {
    fn for_each_mode(&self, f: &mut dyn FnMut([i64; 3], Vec3c)) {
        for p in &self.pieces {
            for k in p.bx.points() {
                let s = p.symbol(k.map(|c| c as f64));
                f(k, s.map(|c| p.amp * c));
            }
        }
    }

    fn extent(&self) -> [i64; 3] {
        let mut e = [0i64; 3];
        for p in &self.pieces {
            let x = p.bx.extent();
            for d in 0..3 {
                e[d] = e[d].max(x[d]);
            }
        }
        e
    }
}
