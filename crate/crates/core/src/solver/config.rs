use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::construction::Mode;
use crate::error::{LabError, Result};
use crate::spectral::GridSpec;

/// `"auto"` (CFL-derived) or a fixed positive step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum TimeStep {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for TimeStep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TimeStep::Auto => s.serialize_str("auto"),
            TimeStep::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for TimeStep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(TimeStep::Fixed(v)),
            Raw::Str(s) if s == "auto" => Ok(TimeStep::Auto),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("dt must be a number or \"auto\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    /// Smoothness; defaults to `3/r + theta - 3` (or gamma for b).
    #[serde(default)]
    pub s: Option<f64>,
    pub r: f64,
}

fn default_record_every() -> usize {
    10
}

fn default_true() -> bool {
    true
}

fn default_probes() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1]
}

fn default_cfl_limit() -> f64 {
    0.5
}

fn default_cfl_safety() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: Mode,
    pub grid_n: usize,
    pub mu: f64,
    pub nu: f64,
    #[serde(default)]
    pub dt: TimeStep,
    pub t_end: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub tracked_shells: Vec<i32>,
    #[serde(default)]
    pub besov: Option<BesovSpec>,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Off gives the diffusion-only reference run.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default = "default_probes")]
    pub probe_times: Vec<f64>,
    #[serde(default = "default_cfl_limit")]
    pub cfl_limit: f64,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
}

impl SolverConfig {
    pub fn new(mode: Mode, grid_n: usize, mu: f64, nu: f64, t_end: f64) -> Self {
        Self {
            mode,
            grid_n,
            mu,
            nu,
            dt: TimeStep::Auto,
            t_end,
            record_every: default_record_every(),
            tracked_shells: vec![],
            besov: None,
            dealias: true,
            nonlinear: true,
            probe_times: default_probes(),
            cfl_limit: default_cfl_limit(),
            cfl_safety: default_cfl_safety(),
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_n)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidParameter(m));
        self.grid()?;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive (got {})", self.mu));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be positive (got {})", self.nu));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive (got {})", self.t_end));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive (got {dt})"));
            }
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        if !(self.cfl_limit > 0.0) || !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad("CFL limit must be positive and safety in (0, 1]".into());
        }
        for &q in &self.tracked_shells {
            if q < 0 {
                return bad(format!("tracked shell {q} < 0"));
            }
        }
        if let Some(b) = &self.besov {
            crate::spectral::check_exponent(b.r)?;
        }
        Ok(())
    }
}
