use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Integer box `lo ..= hi` in each coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntBox {
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl IntBox {
    pub fn new(lo: [i64; 3], hi: [i64; 3]) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|d| self.lo[d] > self.hi[d])
    }

    pub fn count(&self) -> u128 {
        if self.is_empty() {
            return 0;
        }
        (0..3)
            .map(|d| (self.hi[d] as i128 - self.lo[d] as i128 + 1) as u128)
            .product()
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: [0, 1, 2].map(|d| -self.hi[d]),
            hi: [0, 1, 2].map(|d| -self.lo[d]),
        }
    }

    /// Minkowski sum; for boxes it is again a box.
    pub fn sum(&self, o: &Self) -> Self {
        Self {
            lo: [0, 1, 2].map(|d| self.lo[d] + o.lo[d]),
            hi: [0, 1, 2].map(|d| self.hi[d] + o.hi[d]),
        }
    }

    pub fn intersect(&self, o: &Self) -> Self {
        Self {
            lo: [0, 1, 2].map(|d| self.lo[d].max(o.lo[d])),
            hi: [0, 1, 2].map(|d| self.hi[d].min(o.hi[d])),
        }
    }

    pub fn intersects(&self, o: &Self) -> bool {
        !self.intersect(o).is_empty()
    }

    pub fn contains(&self, k: [i64; 3]) -> bool {
        (0..3).all(|d| self.lo[d] <= k[d] && k[d] <= self.hi[d])
    }

    pub fn interval(&self, d: usize) -> (i64, i64) {
        (self.lo[d], self.hi[d])
    }

    pub fn extent(&self) -> [i64; 3] {
        [0, 1, 2].map(|d| self.lo[d].abs().max(self.hi[d].abs()))
    }

    /// Smallest and largest `|k|^2` over the box.
    pub fn radius2_range(&self) -> (i128, i128) {
        let mut lo = 0i128;
        let mut hi = 0i128;
        for d in 0..3 {
            let (a, b) = (self.lo[d] as i128, self.hi[d] as i128);
            let m = if a <= 0 && b >= 0 { 0 } else { (a * a).min(b * b) };
            lo += m;
            hi += (a * a).max(b * b);
        }
        (lo, hi)
    }

    pub fn points(&self) -> impl Iterator<Item = [i64; 3]> + '_ {
        let b = *self;
        let empty = b.is_empty();
        (b.lo[0]..=b.hi[0])
            .filter(move |_| !empty)
            .flat_map(move |x| (b.lo[1]..=b.hi[1]).flat_map(move |y| (b.lo[2]..=b.hi[2]).map(move |z| [x, y, z])))
    }
}

/// The three blocks attached to shell `q_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSet {
    pub j: usize,
    pub q: i32,
    pub l: IntBox,
    pub m: IntBox,
    pub n: IntBox,
}

fn lam(q: i32) -> f64 {
    2f64.powi(q)
}

/// `L = [λ, (1+c)λ] x [-cλ, cλ]^2` with `λ = 2^q`.
pub fn block_l(q: i32, c: f64) -> IntBox {
    let l = lam(q);
    let w = (c * l).floor() as i64;
    IntBox::new([l.ceil() as i64, -w, -w], [((1.0 + c) * l).floor() as i64, w, w])
}

/// `M = [-cλ', cλ']^2 x [λ', (1+c)λ']` with `λ' = 2^{q-1}`.
pub fn block_m(q: i32, c: f64) -> IntBox {
    let l = lam(q - 1);
    let w = (c * l).floor() as i64;
    IntBox::new([-w, -w, l.ceil() as i64], [w, w, ((1.0 + c) * l).floor() as i64])
}

/// Builds the block set for shell `q` and checks its geometric requirements.
pub fn block_set(j: usize, q: i32, c: f64) -> Result<BlockSet> {
    let l = block_l(q, c);
    let m = block_m(q, c);
    if l.is_empty() || m.is_empty() {
        return Err(LabError::ConstructionIntegrity(format!(
            "empty block at q={q} with c={c}"
        )));
    }
    let n = l.sum(&m);
    let set = BlockSet { j, q, l, m, n };
    set.check()?;
    Ok(set)
}

/// True when every lattice point of `b` has `λ <= |k| <= 3λ/2`.
pub fn on_plateau(b: &IntBox, q: i32) -> bool {
    let (lo, hi) = b.radius2_range();
    let l = 1i128 << q;
    lo >= l * l && 4 * hi <= 9 * l * l
}

impl BlockSet {
    pub fn l_star(&self) -> IntBox {
        self.l.neg()
    }
    pub fn m_star(&self) -> IntBox {
        self.m.neg()
    }
    pub fn n_star(&self) -> IntBox {
        self.n.neg()
    }

    fn check(&self) -> Result<()> {
        let q = self.q;
        if !on_plateau(&self.l, q) || !on_plateau(&self.n, q) {
            return Err(LabError::ConstructionIntegrity(format!(
                "L or N leaves the plateau of shell {q}; c is too large"
            )));
        }
        if !on_plateau(&self.m, q - 1) {
            return Err(LabError::ConstructionIntegrity(format!(
                "M leaves the plateau of shell {}",
                q - 1
            )));
        }
        let names = [
            ("L", self.l),
            ("L*", self.l_star()),
            ("N", self.n),
            ("N*", self.n_star()),
            ("M", self.m),
            ("M*", self.m_star()),
        ];
        for (i, (na, a)) in names.iter().enumerate() {
            for (nb, b) in &names[i + 1..] {
                if a.intersects(b) {
                    return Err(LabError::ConstructionIntegrity(format!(
                        "blocks {na} and {nb} of shell {q} overlap"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn all_boxes(&self) -> [(&'static str, IntBox); 6] {
        [
            ("L", self.l),
            ("L*", self.l_star()),
            ("N", self.n),
            ("N*", self.n_star()),
            ("M", self.m),
            ("M*", self.m_star()),
        ]
    }
}
