//! Command-line experiments over the `lab-core` modules, persisted in an
//! append-only experiment store.

pub mod commands;
pub mod config;
pub mod exit;
pub mod store;

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub use exit::{ExitKind, Failure};
pub use store::{Check, Experiment, Manifest, SeedCheck};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Construct,
    Verify,
    Region,
    Simulate,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Construct => "construct",
            Command::Verify => "verify",
            Command::Region => "region",
            Command::Simulate => "simulate",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed_check: bool,
    pub strict_boundaries: bool,
}

impl Options {
    pub fn new(config: Option<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            config,
            out: out.into(),
            seed_check: false,
            strict_boundaries: false,
        }
    }
}

/// One file produced by a command, kept in memory until the store writes it.
#[derive(Clone, Debug)]
pub enum Artifact {
    Json(String, Value),
    JsonGz(String, Value),
    Text(String, String),
    Bytes(String, Vec<u8>),
}

impl Artifact {
    pub fn json<T: Serialize + ?Sized>(name: &str, v: &T) -> Self {
        Artifact::Json(name.into(), serde_json::to_value(v).expect("artifact serialises"))
    }

    pub fn name(&self) -> &str {
        match self {
            Artifact::Json(n, _) | Artifact::JsonGz(n, _) | Artifact::Text(n, _) | Artifact::Bytes(n, _) => n,
        }
    }
}

/// What a command computed before anything touches the disk.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
    /// Reported numbers; compared by `--seed-check`.
    pub numbers: Value,
    /// Set when the computation stopped early.
    pub failure: Option<Failure>,
}

impl Outcome {
    pub fn failed(f: Failure) -> Self {
        Self {
            failure: Some(f),
            ..Self::default()
        }
    }

    pub fn exit_kind(&self) -> ExitKind {
        if let Some(f) = &self.failure {
            f.kind
        } else if self.checks.iter().all(|c| c.pass) {
            ExitKind::Ok
        } else {
            ExitKind::CheckFailed
        }
    }
}

/// Result of one command invocation.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub exit: ExitKind,
    pub dir: Option<PathBuf>,
    pub manifest: Option<Manifest>,
    pub message: Option<String>,
}

impl RunResult {
    pub fn code(&self) -> i32 {
        self.exit.code()
    }
}

/// Largest relative difference between matching numbers of two JSON trees,
/// or `None` when their shapes differ.
pub fn max_rel_diff(a: &Value, b: &Value) -> Option<(f64, usize)> {
    fn walk(a: &Value, b: &Value, acc: &mut (f64, usize)) -> bool {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
                let d = (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
                acc.0 = acc.0.max(if x == y { 0.0 } else { d });
                acc.1 += 1;
                true
            }
            (Value::Array(x), Value::Array(y)) => {
                x.len() == y.len() && x.iter().zip(y).all(|(x, y)| walk(x, y, acc))
            }
            (Value::Object(x), Value::Object(y)) => {
                x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| walk(v, w, acc)))
            }
            _ => a == b,
        }
    }
    let mut acc = (0.0, 0);
    walk(a, b, &mut acc).then_some(acc)
}

/// Relative tolerance for `--seed-check` reruns.
pub const SEED_TOLERANCE: f64 = 1e-12;

/// Runs `cmd`, writes its experiment directory and returns the exit status.
pub fn run_command(cmd: Command, opt: &Options) -> RunResult {
    let prepared = match commands::prepare(cmd, opt) {
        Ok(p) => p,
        Err(f) => return persist_failure(cmd, opt, f),
    };
    let mut outcome = (prepared.compute)();
    let seed = if opt.seed_check && outcome.failure.is_none() {
        let again = (prepared.compute)();
        let diff = max_rel_diff(&outcome.numbers, &again.numbers);
        let (d, n) = diff.unwrap_or((f64::INFINITY, 0));
        let sc = SeedCheck {
            reproduced: diff.is_some() && d <= SEED_TOLERANCE,
            max_rel_diff: d,
            tolerance: SEED_TOLERANCE,
            compared: n,
        };
        outcome
            .checks
            .push(Check::at_most("seed_check", d, SEED_TOLERANCE).with_detail(format!("{n} numbers compared")));
        Some(sc)
    } else {
        None
    };
    persist(cmd, opt, &prepared.inputs, outcome, seed)
}

fn persist_failure(cmd: Command, opt: &Options, f: Failure) -> RunResult {
    let inputs = serde_json::json!({ "config_path": opt.config.as_ref().map(|p| p.display().to_string()) });
    persist(cmd, opt, &inputs, Outcome::failed(f), None)
}

fn persist(cmd: Command, opt: &Options, inputs: &Value, outcome: Outcome, seed: Option<SeedCheck>) -> RunResult {
    let exit = outcome.exit_kind();
    let digest = store::digest(inputs);
    let mut exp = match Experiment::create(&opt.out, cmd.name(), &digest) {
        Ok(e) => e,
        Err(e) => {
            return RunResult {
                exit: ExitKind::CheckFailed,
                dir: None,
                manifest: None,
                message: Some(format!("cannot create experiment directory: {e}")),
            }
        }
    };
    let written = write_all(&mut exp, inputs, &outcome.artifacts);
    let (exit, failure) = match (written, outcome.failure.clone()) {
        (Err(e), _) => (ExitKind::CheckFailed, Some(Failure::io(e))),
        (Ok(()), f) => (exit, f),
    };
    let failed_checks: Vec<&str> = outcome.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let (reason_code, reason) = match (&failure, exit) {
        (Some(f), _) => (Some(f.code.clone()), Some(f.message.clone())),
        (None, ExitKind::CheckFailed) => (Some("check_failed".to_string()), Some(failed_checks.join(","))),
        _ => (None, None),
    };
    let manifest = Manifest {
        id: exp.id.clone(),
        command: cmd.name().into(),
        config_digest: digest,
        versions: store::versions(),
        inputs: inputs.clone(),
        artifacts: exp.artifacts.clone(),
        checks: outcome.checks.clone(),
        status: if exit == ExitKind::Ok { "pass".into() } else { "fail".into() },
        exit_code: exit.code(),
        reason_code,
        reason: reason.clone(),
        seed_check: seed,
    };
    if let Err(e) = exp.write_json("manifest.json", &manifest) {
        return RunResult {
            exit: ExitKind::CheckFailed,
            dir: Some(exp.dir),
            manifest: Some(manifest),
            message: Some(format!("cannot write manifest: {e}")),
        };
    }
    RunResult {
        exit,
        dir: Some(exp.dir),
        manifest: Some(manifest),
        message: reason,
    }
}

fn write_all(exp: &mut Experiment, inputs: &Value, artifacts: &[Artifact]) -> std::io::Result<()> {
    exp.write_json("config.json", inputs)?;
    for a in artifacts {
        match a {
            Artifact::Json(n, v) => exp.write_json(n, v)?,
            Artifact::JsonGz(n, v) => exp.write_json_gz(n, v)?,
            Artifact::Text(n, t) => exp.write_text(n, t)?,
            Artifact::Bytes(n, b) => exp.write_with(n, |w| std::io::Write::write_all(w, b))?,
        }
    }
    Ok(())
}

/// Reads a stored manifest as JSON.
pub fn read_manifest(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|_| Failure::missing(path))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new(ExitKind::InvalidParameters, "manifest_format", e.to_string()))
}
