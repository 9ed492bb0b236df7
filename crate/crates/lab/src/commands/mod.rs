pub mod construct;
pub mod region;
pub mod report;
pub mod simulate;
pub mod verify;

use serde::Serialize;
use serde_json::Value;

use lab_core::construction::{NormRow, NormTable, ShellPiece};

use crate::config::{self, Exponent};
use crate::exit::Failure;
use crate::store::Check;
use crate::{Command, Options, Outcome};

/// A parsed config and the computation it drives.
pub struct Prepared {
    /// Canonical typed config; the experiment digest is taken over this.
    pub inputs: Value,
    pub compute: Box<dyn Fn() -> Outcome>,
}

impl Prepared {
    fn new<C: Serialize>(cfg: &C, compute: impl Fn() -> Outcome + 'static) -> Self {
        Self {
            inputs: serde_json::to_value(cfg).expect("config serialises"),
            compute: Box::new(compute),
        }
    }
}

fn config_path(opt: &Options) -> Result<&std::path::Path, Failure> {
    opt.config.as_deref().ok_or_else(|| {
        Failure::new(
            crate::ExitKind::InvalidParameters,
            "config_missing",
            "this command needs --config PATH",
        )
    })
}

pub fn prepare(cmd: Command, opt: &Options) -> Result<Prepared, Failure> {
    match cmd {
        Command::Construct => Ok(construct::prepare(config::load(config_path(opt)?)?)),
        Command::Verify => Ok(verify::prepare(config::load(config_path(opt)?)?)),
        Command::Region => {
            let mut cfg: config::RegionConfig = match &opt.config {
                Some(p) => config::load(p)?,
                None => config::RegionConfig::default(),
            };
            cfg.strictness = config::strictness(opt.strict_boundaries, cfg.strictness);
            Ok(region::prepare(cfg))
        }
        Command::Simulate => Ok(simulate::prepare(config::load(config_path(opt)?)?)),
        Command::Report => report::prepare(config_path(opt)?),
    }
}

/// Collects the checks of an outcome built step by step and stops at the first error.
macro_rules! attempt {
    ($outcome:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                $outcome.failure = Some(crate::exit::Failure::from(err));
                return $outcome;
            }
        }
    };
}
pub(crate) use attempt;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormTableOut {
    pub piece: String,
    pub r: Exponent,
    pub exponent: f64,
    pub rows: Vec<NormRow>,
    pub skipped: Vec<i32>,
    pub ratio: Option<f64>,
    pub slope: Option<f64>,
    pub predicted_slope: f64,
    /// `lacunary` or `family`.
    pub shells: String,
}

impl NormTableOut {
    pub fn new(t: &NormTable, shells: &str) -> Self {
        Self {
            piece: t.piece.clone(),
            r: Exponent(t.r),
            exponent: t.exponent,
            rows: t.rows.clone(),
            skipped: t.skipped.clone(),
            ratio: t.ratio.is_finite().then_some(t.ratio),
            slope: t.slope().ok().map(|f| f.slope),
            predicted_slope: t.predicted_slope(),
            shells: shells.into(),
        }
    }

    pub fn tag(&self) -> String {
        format!("{}:{}:r={}", self.shells, self.piece, self.r)
    }

    /// Uniform boundedness, evaluated when at least three shells are present.
    pub fn bounded_check(&self, limit: f64) -> Option<Check> {
        (self.rows.len() >= 3).then(|| {
            Check::at_most(format!("bounded:{}", self.tag()), self.ratio.unwrap_or(f64::INFINITY), limit)
        })
    }

    pub fn slope_check(&self, tol: f64) -> Option<Check> {
        let s = self.slope?;
        let dev = (s - self.predicted_slope).abs();
        Some(
            Check::at_most(format!("lp_slope:{}", self.tag()), dev, tol)
                .with_detail(format!("slope {s:.4} predicted {:.4}", self.predicted_slope)),
        )
    }
}

pub fn norm_csv(tables: &[NormTableOut]) -> String {
    let mut s = String::from("shells,piece,r,q,norm,normalized\n");
    for t in tables {
        for row in &t.rows {
            s.push_str(&format!(
                "{},{},{},{},{:.17e},{:.17e}\n",
                t.shells, t.piece, t.r, row.q, row.norm, row.normalized
            ));
        }
    }
    s
}

pub fn velocity_pieces(mode: lab_core::construction::Mode) -> &'static [ShellPiece] {
    match mode {
        lab_core::construction::Mode::Nse => &[ShellPiece::UTop, ShellPiece::ULow],
        lab_core::construction::Mode::Mhd => &[ShellPiece::UTop, ShellPiece::B],
    }
}

pub fn fmt_f(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}
