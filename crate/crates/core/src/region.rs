//! Admissible parameter sets for the discontinuity results and the `(1/r, s)` sweep.

use serde::{Deserialize, Serialize};

use crate::construction::Mode;
use crate::error::{LabError, Result};

/// Slack used when comparing against boundary values, so that decimal inputs
/// sitting exactly on a boundary land on the side the statement prescribes.
const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionQuery {
    /// Integrability exponent; `f64::INFINITY` is allowed.
    pub r: f64,
    pub theta: f64,
    pub gamma: Option<f64>,
}

impl RegionQuery {
    pub fn nse(r: f64, theta: f64) -> Self {
        Self { r, theta, gamma: None }
    }

    pub fn mhd(r: f64, theta: f64, gamma: f64) -> Self {
        Self { r, theta, gamma: Some(gamma) }
    }

    pub fn from_inv_r(inv_r: f64, theta: f64, gamma: Option<f64>) -> Self {
        let r = if inv_r == 0.0 { f64::INFINITY } else { 1.0 / inv_r };
        Self { r, theta, gamma }
    }

    pub fn inv_r(&self) -> f64 {
        if self.r.is_infinite() {
            0.0
        } else {
            1.0 / self.r
        }
    }

    pub fn s_u(&self) -> f64 {
        3.0 * self.inv_r() + self.theta - 3.0
    }

    pub fn s_b(&self) -> Option<f64> {
        self.gamma.map(|g| 3.0 * self.inv_r() + g - 3.0)
    }
}

/// Whether the `<= 11/2` conditions are closed (as stated in the theorems) or strict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    #[default]
    Theorem,
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    RRange,
    ThetaRange,
    GammaRange,
    GammaMissing,
    ThetaGammaSum,
    /// `2 <= theta + 3/r`
    LowerCritical,
    /// `theta + 3/r < 3`
    UpperCritical,
    /// `gamma <= 5/2`
    GammaCap,
    /// `gamma + 3/r < 4`
    GammaCritical,
    /// `r >= 3/2`
    RLower,
    /// `3 <= theta + 3/r`
    SecondLower,
    /// `theta + 3/r < 4`
    SecondUpper,
    /// `2 theta + 3/r <= 11/2`
    NseEnergy,
    /// `theta + gamma + 3/r <= 11/2`
    MhdEnergy,
}

impl Condition {
    pub fn code(self) -> &'static str {
        match self {
            Condition::RRange => "r_range",
            Condition::ThetaRange => "theta_range",
            Condition::GammaRange => "gamma_range",
            Condition::GammaMissing => "gamma_missing",
            Condition::ThetaGammaSum => "theta_plus_gamma",
            Condition::LowerCritical => "theta_3r_lt_2",
            Condition::UpperCritical => "theta_3r_ge_3",
            Condition::GammaCap => "gamma_gt_5_2",
            Condition::GammaCritical => "gamma_3r_ge_4",
            Condition::RLower => "r_lt_3_2",
            Condition::SecondLower => "theta_3r_lt_3",
            Condition::SecondUpper => "theta_3r_ge_4",
            Condition::NseEnergy => "2theta_3r_gt_11_2",
            Condition::MhdEnergy => "theta_gamma_3r_gt_11_2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub admissible: bool,
    /// 1 or 2 when admissible.
    pub branch: Option<u8>,
    /// Failing conditions: a global one, or the first failure of each branch.
    pub failed: Vec<Condition>,
}

impl Verdict {
    fn ok(branch: u8) -> Self {
        Self { admissible: true, branch: Some(branch), failed: vec![] }
    }

    fn fail(failed: Vec<Condition>) -> Self {
        Self { admissible: false, branch: None, failed }
    }

    pub fn reason(&self) -> String {
        match self.branch {
            Some(b) => format!("branch{b}"),
            None => self.failed.iter().map(|c| c.code()).collect::<Vec<_>>().join(";"),
        }
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + EPS
}

fn lt(a: f64, b: f64) -> bool {
    a < b - EPS
}

fn energy_ok(a: f64, st: Strictness) -> bool {
    match st {
        Strictness::Theorem => le(a, 5.5),
        Strictness::Strict => lt(a, 5.5),
    }
}

fn first_failure(conds: &[(bool, Condition)]) -> Option<Condition> {
    conds.iter().find(|(ok, _)| !ok).map(|(_, c)| *c)
}

fn common(q: &RegionQuery) -> Option<Condition> {
    let x = q.inv_r();
    if !(q.r > 1.0) || !(x >= 0.0) {
        return Some(Condition::RRange);
    }
    if !(q.theta > 1.5 + EPS && le(q.theta, 2.0)) {
        return Some(Condition::ThetaRange);
    }
    None
}

pub fn nse_admissible(q: &RegionQuery) -> Verdict {
    nse_admissible_with(q, Strictness::Theorem)
}

pub fn nse_admissible_with(q: &RegionQuery, st: Strictness) -> Verdict {
    if let Some(c) = common(q) {
        return Verdict::fail(vec![c]);
    }
    let a = q.theta + 3.0 * q.inv_r();
    let b1 = first_failure(&[
        (le(2.0, a), Condition::LowerCritical),
        (lt(a, 3.0), Condition::UpperCritical),
    ]);
    if b1.is_none() {
        return Verdict::ok(1);
    }
    let b2 = first_failure(&[
        (q.r >= 1.5 - EPS, Condition::RLower),
        (le(3.0, a), Condition::SecondLower),
        (lt(a, 4.0), Condition::SecondUpper),
        (energy_ok(2.0 * q.theta + 3.0 * q.inv_r(), st), Condition::NseEnergy),
    ]);
    match b2 {
        None => Verdict::ok(2),
        Some(c) => Verdict::fail(vec![b1.unwrap(), c]),
    }
}

pub fn mhd_admissible(q: &RegionQuery) -> Verdict {
    mhd_admissible_with(q, Strictness::Theorem)
}

pub fn mhd_admissible_with(q: &RegionQuery, st: Strictness) -> Verdict {
    if let Some(c) = common(q) {
        return Verdict::fail(vec![c]);
    }
    let Some(g) = q.gamma else {
        return Verdict::fail(vec![Condition::GammaMissing]);
    };
    if !(g > 1.5 + EPS) {
        return Verdict::fail(vec![Condition::GammaRange]);
    }
    if !le(q.theta + g, 4.0) {
        return Verdict::fail(vec![Condition::ThetaGammaSum]);
    }
    let x3 = 3.0 * q.inv_r();
    let a = q.theta + x3;
    let b1 = first_failure(&[
        (le(g, 2.5), Condition::GammaCap),
        (le(2.0, a), Condition::LowerCritical),
        (lt(a, 3.0), Condition::UpperCritical),
        (lt(g + x3, 4.0), Condition::GammaCritical),
    ]);
    if b1.is_none() {
        return Verdict::ok(1);
    }
    let b2 = first_failure(&[
        (q.r >= 1.5 - EPS, Condition::RLower),
        (le(3.0, a), Condition::SecondLower),
        (lt(g + x3, 4.0), Condition::GammaCritical),
        (energy_ok(q.theta + g + x3, st), Condition::MhdEnergy),
    ]);
    match b2 {
        None => Verdict::ok(2),
        Some(c) => Verdict::fail(vec![b1.unwrap(), c]),
    }
}

pub fn admissible(mode: Mode, q: &RegionQuery, st: Strictness) -> Verdict {
    match mode {
        Mode::Nse => nse_admissible_with(q, st),
        Mode::Mhd => mhd_admissible_with(q, st),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub inv_r: f64,
    pub s: f64,
    pub theta: f64,
    pub gamma: Option<f64>,
    pub admissible: bool,
    pub branch: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub mode: Mode,
    pub resolution: usize,
    pub points: Vec<RegionPoint>,
    /// Extremal points checked against the figure: `(0, -1)` and `(1/2, 0)`.
    pub extremal: Vec<RegionPoint>,
    /// Boundary polygon in `(1/r, s)`: lower envelope left to right, then upper right to left.
    pub polygon: Vec<[f64; 2]>,
    /// Admissible area in the `(1/r, s)` plane.
    pub area: f64,
}

/// Gamma values probed per `(1/r, theta)` cell in MHD mode.
fn gamma_samples(resolution: usize) -> Vec<f64> {
    // gamma ranges over (3/2, 5/2]; theta + gamma <= 4 trims it further.
    (1..=resolution).map(|i| 1.5 + i as f64 / resolution as f64).collect()
}

fn classify(mode: Mode, inv_r: f64, theta: f64, gammas: &[f64], st: Strictness) -> RegionPoint {
    let point = |gamma: Option<f64>, v: &Verdict| RegionPoint {
        inv_r,
        s: 3.0 * inv_r + theta - 3.0,
        theta,
        gamma,
        admissible: v.admissible,
        branch: v.branch,
    };
    match mode {
        Mode::Nse => point(None, &nse_admissible_with(&RegionQuery::from_inv_r(inv_r, theta, None), st)),
        Mode::Mhd => {
            for &g in gammas {
                let v = mhd_admissible_with(&RegionQuery::from_inv_r(inv_r, theta, Some(g)), st);
                if v.admissible {
                    return point(Some(g), &v);
                }
            }
            point(None, &Verdict::fail(vec![]))
        }
    }
}

/// Sweeps `1/r in [0, 1)` and `theta in (3/2, 2]` on a cell-centred grid,
/// then classifies `s = 3/r + theta - 3`. MHD cells count as admissible if
/// some sampled gamma is.
pub fn emit_region_grid(resolution: usize, mode: Mode) -> Result<RegionGrid> {
    emit_region_grid_with(resolution, mode, Strictness::Theorem)
}

pub fn emit_region_grid_with(resolution: usize, mode: Mode, st: Strictness) -> Result<RegionGrid> {
    if resolution < 8 {
        return Err(LabError::InvalidParameter(format!(
            "region resolution must be >= 8 (got {resolution})"
        )));
    }
    let n = resolution;
    let gammas = gamma_samples(n);
    let dx = 1.0 / n as f64;
    let dth = 0.5 / n as f64;
    let mut points = Vec::with_capacity(n * n);
    let mut polygon_lo = Vec::new();
    let mut polygon_hi = Vec::new();
    let mut hits = 0usize;
    for i in 0..n {
        let x = (i as f64 + 0.5) * dx;
        let mut lo: Option<f64> = None;
        let mut hi: Option<f64> = None;
        for k in 0..n {
            let theta = 1.5 + (k as f64 + 0.5) * dth;
            let p = classify(mode, x, theta, &gammas, st);
            if p.admissible {
                hits += 1;
                lo = Some(lo.map_or(p.s, |v: f64| v.min(p.s)));
                hi = Some(hi.map_or(p.s, |v: f64| v.max(p.s)));
            }
            points.push(p);
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            polygon_lo.push([x, l - 0.5 * dth]);
            polygon_hi.push([x, h + 0.5 * dth]);
        }
    }
    polygon_hi.reverse();
    let polygon = polygon_lo.into_iter().chain(polygon_hi).collect();
    let extremal = vec![
        classify(mode, 0.0, 2.0, &gammas, st),
        classify(mode, 0.5, 1.5, &gammas, st),
    ];
    Ok(RegionGrid {
        mode,
        resolution,
        points,
        extremal,
        polygon,
        area: hits as f64 * dx * dth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_routes_to_second_branch() {
        // theta + 3/r = 3 exactly.
        let v = nse_admissible(&RegionQuery::nse(3.0, 2.0));
        assert_eq!(v.branch, Some(2));
    }

    #[test]
    fn strict_toggle_changes_energy_boundary() {
        let q = RegionQuery::mhd(2.0, 2.0, 2.0);
        assert!(mhd_admissible(&q).admissible);
        assert!(!mhd_admissible_with(&q, Strictness::Strict).admissible);
    }
}
