use std::fs;
use std::path::Path;

use lab_core::construction::{ConstructionParams, Mode};
use lab_core::region::Strictness;
use lab_core::solver::SolverConfig;
use lab_core::trilinear::TrilOptions;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exit::{ExitKind, Failure};

/// A Lebesgue exponent; `"inf"` in JSON for the supremum norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(Exponent(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("exponent must be a number or \"inf\", got {s:?}"))),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn default_norm_r() -> Vec<Exponent> {
    vec![Exponent(2.0), Exponent(4.0), Exponent(f64::INFINITY)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    pub construction: ConstructionParams,
    /// Materialise the data on an `n^3` grid; sparse only when absent.
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default = "default_norm_r")]
    pub norm_r: Vec<Exponent>,
}

/// Consecutive shells used for the `p != 2` scaling scans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub velocity: Vec<i32>,
    #[serde(default)]
    pub magnetic: Vec<i32>,
}

impl Default for FamilySpec {
    fn default() -> Self {
        Self {
            velocity: vec![4, 5, 6, 7],
            magnetic: vec![6, 7, 8, 9],
        }
    }
}

fn default_ratio_limit() -> f64 {
    4.0
}

fn default_slope_tolerance() -> f64 {
    lab_core::trilinear::SLOPE_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub construction: ConstructionParams,
    #[serde(default)]
    pub trilinear: TrilOptions,
    #[serde(default = "default_norm_r")]
    pub norm_r: Vec<Exponent>,
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default = "default_ratio_limit")]
    pub ratio_limit: f64,
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    /// Also split the velocity row into high, local and low parts (NSE).
    #[serde(default)]
    pub decompose: bool,
}

fn default_resolution() -> usize {
    64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionPointSpec {
    pub r: Exponent,
    pub theta: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub mode: Mode,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub strictness: Strictness,
    /// Individual points evaluated and written next to the grid.
    #[serde(default)]
    pub points: Vec<RegionPointSpec>,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Nse,
            resolution: default_resolution(),
            strictness: Strictness::default(),
            points: vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Construction { construction: ConstructionParams },
    TaylorGreen { amplitude: f64 },
}

fn default_balance_tolerance() -> f64 {
    1e-8
}

fn default_production_tolerance() -> f64 {
    1e-8
}

fn default_budget_tolerance() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub solver: SolverConfig,
    pub initial: InitialSpec,
    #[serde(default = "default_balance_tolerance")]
    pub balance_tolerance: f64,
    #[serde(default = "default_production_tolerance")]
    pub production_tolerance: f64,
    #[serde(default = "default_budget_tolerance")]
    pub budget_tolerance: f64,
    /// Write the final state as SVF snapshots.
    #[serde(default)]
    pub snapshots: bool,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::new(
            ExitKind::InvalidParameters,
            "config_unreadable",
            format!("{}: {e}", path.display()),
        )
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::new(
            ExitKind::InvalidParameters,
            "config_format",
            format!("{}: {e}", path.display()),
        )
    })
}

/// Names the violated admissibility condition of the construction, if any.
pub fn construction_condition(p: &ConstructionParams) -> Option<Failure> {
    let fail = |code: &str, msg: String| Some(Failure::new(ExitKind::InvalidParameters, code, msg));
    let t = p.theta;
    if !(t > 1.5) {
        return fail("theta_le_3_2", format!("theta <= 3/2 (theta={t})"));
    }
    if !(t <= 2.0) {
        return fail("theta_gt_2", format!("theta > 2 (theta={t})"));
    }
    if p.mode == Mode::Mhd {
        let Some(g) = p.gamma else {
            return fail("gamma_missing", "MHD mode requires gamma".into());
        };
        if !(g > 1.5) {
            return fail("gamma_le_3_2", format!("gamma <= 3/2 (gamma={g})"));
        }
        if !(t + g <= 4.0) {
            return fail("theta_gamma_gt_4", format!("theta + gamma > 4 (theta+gamma={})", t + g));
        }
    }
    p.validate().err().map(Failure::from)
}


pub fn strictness(strict: bool, cfg: Strictness) -> Strictness {
    if strict {
        Strictness::Strict
    } else {
        cfg
    }
}
