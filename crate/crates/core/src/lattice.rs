//! Sums of smooth functions over lattice points of boxes and of the planar
//! polygons `{x + y + z = 0}` cut out by three integer intervals.
//!
//! Intervals up to `SumRule::exact_len` points are enumerated. Longer ones use the
//! midpoint Euler-Maclaurin rule
//! `sum_{i=a}^{b} g(i) ≈ ∫_{a-1/2}^{b+1/2} g - (g'(b+1/2) - g'(a-1/2)) / 24`
//! with Gauss-Legendre for the integral and central differences for `g'`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRule {
    /// Intervals with at most this many points are summed exactly.
    pub exact_len: i64,
    /// Gauss-Legendre order for long intervals.
    pub order: usize,
}

impl SumRule {
    pub const fn exact() -> Self {
        Self {
            exact_len: i64::MAX,
            order: 8,
        }
    }

    pub const fn quadrature() -> Self {
        Self {
            exact_len: 12,
            order: 8,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact_len == i64::MAX
    }
}

impl Default for SumRule {
    fn default() -> Self {
        Self::quadrature()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; p];
    let mut w = vec![0.0; p];
    for i in 0..(p + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..p {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = p as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[p - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[p - 1 - i] = w[i];
    }
    (x, w)
}

fn gl_cached(p: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let table = CACHE.get_or_init(|| (0..=32).map(gauss_legendre).collect());
    &table[p.min(32)]
}

fn fd_step(x: f64) -> f64 {
    (x.abs() * 2f64.powi(-26)).max(0.5)
}

/// Euler-Maclaurin nodes for `sum_{i=a}^{b} g(i)` continued to real endpoints.
pub fn em_nodes(order: usize, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    let lo = a - 0.5;
    let hi = b + 0.5;
    let (t, w) = gl_cached(order);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    for (ti, wi) in t.iter().zip(w) {
        out.push((mid + half * ti, half * wi));
    }
    let hb = fd_step(hi);
    out.push((hi + hb, -1.0 / (48.0 * hb)));
    out.push((hi - hb, 1.0 / (48.0 * hb)));
    let ha = fd_step(lo);
    out.push((lo + ha, 1.0 / (48.0 * ha)));
    out.push((lo - ha, -1.0 / (48.0 * ha)));
}

/// Nodes for `sum_{i=lo}^{hi} g(i)`; empty when `hi < lo`.
pub fn line_nodes(rule: &SumRule, lo: i64, hi: i64, out: &mut Vec<(f64, f64)>) {
    if hi < lo {
        return;
    }
    let len = (hi as i128 - lo as i128 + 1) as u128;
    if len <= rule.exact_len as u128 {
        out.extend((lo..=hi).map(|i| (i as f64, 1.0)));
    } else {
        em_nodes(rule.order, lo as f64, hi as f64, out);
    }
}

pub fn line_node_count(rule: &SumRule, lo: i64, hi: i64) -> u128 {
    if hi < lo {
        0
    } else {
        let len = (hi as i128 - lo as i128 + 1) as u128;
        if len <= rule.exact_len as u128 {
            len
        } else {
            rule.order as u128 + 4
        }
    }
}

/// Node on the plane `x0 + x1 + x2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriNode {
    pub x: [f64; 3],
    pub w: f64,
}

type Iv = (i64, i64);

/// Projections onto each variable of the lattice polygon, or `None` if empty.
pub fn clip_triple(iv: [Iv; 3]) -> Option<[Iv; 3]> {
    let mut e = [(0, 0); 3];
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let lo = iv[a].0.max(-(iv[b].1 + iv[c].1));
        let hi = iv[a].1.min(-(iv[b].0 + iv[c].0));
        if lo > hi {
            return None;
        }
        e[a] = (lo, hi);
    }
    Some(e)
}

struct Plan {
    /// outer, inner, computed variable indices
    vars: [usize; 3],
    segments: Vec<Segment>,
}

#[derive(Clone, Copy)]
struct Segment {
    s0: i64,
    s1: i64,
    /// inner lower limit is `lo_c - o` when `lo_moves`, else `lo_c`
    lo_c: i64,
    lo_moves: bool,
    hi_c: i64,
    hi_moves: bool,
}

impl Segment {
    fn lo_at(&self, o: f64) -> f64 {
        if self.lo_moves {
            self.lo_c as f64 - o
        } else {
            self.lo_c as f64
        }
    }
    fn hi_at(&self, o: f64) -> f64 {
        if self.hi_moves {
            self.hi_c as f64 - o
        } else {
            self.hi_c as f64
        }
    }
    fn lo_int(&self, o: i64) -> i64 {
        if self.lo_moves {
            self.lo_c - o
        } else {
            self.lo_c
        }
    }
    fn hi_int(&self, o: i64) -> i64 {
        if self.hi_moves {
            self.hi_c - o
        } else {
            self.hi_c
        }
    }
}

fn plan(iv: [Iv; 3]) -> Option<Plan> {
    let e = clip_triple(iv)?;
    let mag = |v: Iv| v.0.unsigned_abs().max(v.1.unsigned_abs());
    let c = (0..3).max_by_key(|&i| (mag(e[i]), i)).unwrap();
    let (p, q) = ((c + 1) % 3, (c + 2) % 3);
    let len = |v: Iv| v.1 as i128 - v.0 as i128;
    let (a, b) = if len(e[p]) <= len(e[q]) { (p, q) } else { (q, p) };
    let (ob, cb) = (e[b], e[c]);
    // inner range at outer value o: [max(ob.0, -cb.1 - o), min(ob.1, -cb.0 - o)]
    let t1 = -cb.1 - ob.0;
    let t2 = -cb.0 - ob.1;
    let (o_lo, o_hi) = e[a];
    let mut cuts: Vec<i64> = [t1, t2]
        .into_iter()
        .filter(|&t| t >= o_lo && t < o_hi)
        .collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut bounds = vec![o_lo];
    for &t in &cuts {
        bounds.push(t + 1);
    }
    let mut segments = Vec::new();
    for (i, &s0) in bounds.iter().enumerate() {
        let s1 = if i + 1 < bounds.len() { bounds[i + 1] - 1 } else { o_hi };
        let lo_moves = s0 <= t1;
        let hi_moves = s0 > t2;
        segments.push(Segment {
            s0,
            s1,
            lo_c: if lo_moves { -cb.1 } else { ob.0 },
            lo_moves,
            hi_c: if hi_moves { -cb.0 } else { ob.1 },
            hi_moves,
        });
    }
    Some(Plan {
        vars: [a, b, c],
        segments,
    })
}

/// Number of lattice points of the polygon.
pub fn polygon_count(iv: [Iv; 3]) -> u128 {
    let Some(pl) = plan(iv) else { return 0 };
    let mut total: i128 = 0;
    for s in &pl.segments {
        // sum_{o=s0}^{s1} (hi(o) - lo(o) + 1), linear in o
        let n = s.s1 as i128 - s.s0 as i128 + 1;
        let f = |o: i128| {
            let lo = if s.lo_moves { s.lo_c as i128 - o } else { s.lo_c as i128 };
            let hi = if s.hi_moves { s.hi_c as i128 - o } else { s.hi_c as i128 };
            hi - lo + 1
        };
        total += n * (f(s.s0 as i128) + f(s.s1 as i128)) / 2;
    }
    total as u128
}

/// Upper bound on the number of nodes `polygon_nodes` will emit.
pub fn polygon_node_bound(rule: &SumRule, iv: [Iv; 3]) -> u128 {
    if rule.is_exact() {
        return polygon_count(iv);
    }
    let Some(pl) = plan(iv) else { return 0 };
    let cap = rule.exact_len.max(0) as u128;
    let long = rule.order as u128 + 4;
    let mut total = 0u128;
    for s in &pl.segments {
        let n = (s.s1 as i128 - s.s0 as i128 + 1) as u128;
        let inner_len = [s.s0, s.s1]
            .iter()
            .map(|&o| (s.hi_int(o) as i128 - s.lo_int(o) as i128 + 1).max(0) as u128)
            .max()
            .unwrap();
        let enumerable = if inner_len <= cap { inner_len } else { long };
        let (outer, inner) = if n <= cap {
            (n, enumerable)
        } else if !s.lo_moves && !s.hi_moves {
            (long, enumerable)
        } else {
            (long, long)
        };
        total += outer * inner;
    }
    total
}

/// Nodes `(x0, x1, x2)`, `x0 + x1 + x2 = 0`, `x_i ∈ iv[i]`, summing a smooth function.
pub fn polygon_nodes(rule: &SumRule, iv: [Iv; 3]) -> Vec<TriNode> {
    let mut out = Vec::new();
    let Some(pl) = plan(iv) else { return out };
    let [a, b, c] = pl.vars;
    let mut push = |o: f64, i: f64, w: f64| {
        let mut x = [0.0; 3];
        x[a] = o;
        x[b] = i;
        x[c] = -(o + i);
        out.push(TriNode { x, w });
    };
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for s in &pl.segments {
        let n = s.s1 as i128 - s.s0 as i128 + 1;
        if n <= rule.exact_len as i128 {
            for o in s.s0..=s.s1 {
                inner.clear();
                line_nodes(rule, s.lo_int(o), s.hi_int(o), &mut inner);
                for &(y, w) in &inner {
                    push(o as f64, y, w);
                }
            }
        } else {
            outer.clear();
            em_nodes(rule.order, s.s0 as f64, s.s1 as f64, &mut outer);
            let fixed = !s.lo_moves && !s.hi_moves;
            for &(o, wo) in &outer {
                inner.clear();
                if fixed {
                    line_nodes(rule, s.lo_c, s.hi_c, &mut inner);
                } else {
                    em_nodes(rule.order, s.lo_at(o), s.hi_at(o), &mut inner);
                }
                for &(y, w) in &inner {
                    push(o, y, wo * w);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(iv: [Iv; 3]) -> Vec<[i64; 3]> {
        let mut v = Vec::new();
        for x in iv[0].0..=iv[0].1 {
            for y in iv[1].0..=iv[1].1 {
                let z = -x - y;
                if z >= iv[2].0 && z <= iv[2].1 {
                    v.push([x, y, z]);
                }
            }
        }
        v
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn exact_polygon_matches_enumeration() {
        let cases = [
            [(-3, 4), (0, 6), (-5, 2)],
            [(10, 12), (-30, -5), (-2, 25)],
            [(0, 0), (-1, 1), (-1, 1)],
            [(5, 9), (5, 9), (5, 9)],
        ];
        for iv in cases {
            let pts = brute(iv);
            assert_eq!(polygon_count(iv), pts.len() as u128, "{iv:?}");
            let nodes = polygon_nodes(&SumRule::exact(), iv);
            let mut got: Vec<[i64; 3]> = nodes
                .iter()
                .map(|n| n.x.map(|v| v as i64))
                .collect();
            got.sort();
            let mut want = pts;
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn quadrature_polygon_sums_smooth_function() {
        let iv = [(1000, 1400), (-900, -300), (-1500, 900)];
        let g = |x: [f64; 3]| 1.0 / (1.0 + (x[0] * x[0] + 0.5 * x[1] * x[1] + x[2] * x[2]) * 1e-6);
        let exact: f64 = brute(iv).iter().map(|p| g(p.map(|v| v as f64))).sum();
        let q: f64 = polygon_nodes(&SumRule::quadrature(), iv)
            .iter()
            .map(|n| n.w * g(n.x))
            .sum();
        assert!(((q - exact) / exact).abs() < 1e-9, "{q} vs {exact}");
    }

    #[test]
    fn line_rule_is_exact_for_cubics() {
        let mut nodes = Vec::new();
        line_nodes(&SumRule::quadrature(), -40, 77, &mut nodes);
        let q: f64 = nodes.iter().map(|(x, w)| w * x * x * x).sum();
        let e: f64 = (-40i64..=77).map(|i| (i * i * i) as f64).sum();
        assert!((q - e).abs() < 1e-6 * e.abs());
    }
}
