use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use flate2::write::GzEncoder;
use flate2::Compression;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: u64 = 1;

/// SHA-256 of the canonical JSON form of `v`.
pub fn digest<T: Serialize + ?Sized>(v: &T) -> String {
    let bytes = serde_json::to_vec(v).expect("config serialises");
    digest_bytes(&bytes)
}

pub fn digest_bytes(b: &[u8]) -> String {
    hex::encode(Sha256::digest(b))
}

/// Adds `schema: 1` to a JSON object.
pub fn with_schema<T: Serialize + ?Sized>(v: &T) -> Value {
    let mut v = serde_json::to_value(v).expect("value serialises");
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), Value::from(SCHEMA));
    }
    v
}

/// One experiment directory; files are created with create-new semantics.
pub struct Experiment {
    pub id: String,
    pub dir: PathBuf,
    pub artifacts: Vec<String>,
}

impl Experiment {
    /// Creates `root/<command>-<digest12>[-N]`, never reusing an existing directory.
    pub fn create(root: &Path, command: &str, digest: &str) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        let base = format!("{command}-{}", &digest[..12.min(digest.len())]);
        for n in 0.. {
            let id = if n == 0 { base.clone() } else { format!("{base}-{n}") };
            let dir = root.join(&id);
            match fs::create_dir(&dir) {
                Ok(()) => {
                    return Ok(Self {
                        id,
                        dir,
                        artifacts: vec![],
                    })
                }
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(e),
            }
        }
        unreachable!()
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Opens a new artifact for writing and records it.
    pub fn create_file(&mut self, name: &str) -> io::Result<BufWriter<File>> {
        let f = File::create_new(self.path(name))?;
        self.artifacts.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, v: &T) -> io::Result<()> {
        let mut w = self.create_file(name)?;
        serde_json::to_writer_pretty(&mut w, &with_schema(v))?;
        writeln!(w)?;
        w.flush()
    }

    pub fn write_json_gz<T: Serialize + ?Sized>(&mut self, name: &str, v: &T) -> io::Result<()> {
        let w = self.create_file(name)?;
        let mut gz = GzEncoder::new(w, Compression::default());
        serde_json::to_writer(&mut gz, &with_schema(v))?;
        gz.finish()?.flush()
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> io::Result<()> {
        let mut w = self.create_file(name)?;
        w.write_all(text.as_bytes())?;
        w.flush()
    }

    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> io::Result<()> {
        let mut w = self.create_file(name)?;
        f(&mut w)?;
        w.flush()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass,
            value: None,
            tolerance: None,
            detail: None,
        }
    }

    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= tolerance,
            value: Some(value),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedCheck {
    pub reproduced: bool,
    pub max_rel_diff: f64,
    pub tolerance: f64,
    pub compared: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub id: String,
    pub command: String,
    pub config_digest: String,
    pub versions: BTreeMap<String, String>,
    pub inputs: Value,
    pub artifacts: Vec<String>,
    pub checks: Vec<Check>,
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason_code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_check: Option<SeedCheck>,
}

pub fn versions() -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("lab".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("lab-core".into(), lab_core::VERSION.into());
    m
}
