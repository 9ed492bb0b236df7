use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use serde_json::{json, Value};

use super::Prepared;
use crate::exit::{ExitKind, Failure};
use crate::store::digest_bytes;
use crate::{read_manifest, Artifact, Outcome};

pub fn prepare(manifest: &Path) -> Result<Prepared, Failure> {
    let bytes = fs::read(manifest).map_err(|_| Failure::missing(manifest))?;
    let inputs = json!({
        "manifest": manifest.display().to_string(),
        "manifest_sha256": digest_bytes(&bytes),
    });
    let path = manifest.to_path_buf();
    Ok(Prepared {
        inputs,
        compute: Box::new(move || compute(&path)),
    })
}

fn load_json(p: &Path) -> Result<Value, Failure> {
    let bytes = fs::read(p).map_err(|_| Failure::missing(p))?;
    let text = if p.extension().is_some_and(|e| e == "gz") {
        let mut s = String::new();
        GzDecoder::new(&bytes[..]).read_to_string(&mut s).map_err(Failure::io)?;
        s
    } else {
        String::from_utf8(bytes).map_err(|e| Failure::new(ExitKind::CheckFailed, "artifact_format", e.to_string()))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::new(ExitKind::CheckFailed, "artifact_format", e.to_string()))
}

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.6e}"),
        None => match v {
            Value::Null => "-".into(),
            Value::String(s) => s.clone(),
            v => v.to_string(),
        },
    }
}

fn csv_num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.17e}"),
        None => match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            v => v.to_string(),
        },
    }
}

pub fn compute(manifest_path: &PathBuf) -> Outcome {
    match render(manifest_path) {
        Ok(o) => o,
        Err(f) => Outcome::failed(f),
    }
}

fn render(path: &Path) -> Result<Outcome, Failure> {
    let m = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let names: Vec<String> = m["artifacts"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
        .unwrap_or_default();
    for n in &names {
        let p = dir.join(n);
        if !p.is_file() {
            return Err(Failure::missing(&p));
        }
    }
    let has = |n: &str| names.iter().any(|x| x == n);
    let mut out = Outcome::default();
    let mut txt = String::new();
    writeln!(txt, "experiment {}", m["id"].as_str().unwrap_or("?")).unwrap();
    writeln!(txt, "command    {}", m["command"].as_str().unwrap_or("?")).unwrap();
    writeln!(txt, "digest     {}", m["config_digest"].as_str().unwrap_or("?")).unwrap();
    writeln!(txt, "status     {} (exit {})", m["status"].as_str().unwrap_or("?"), m["exit_code"]).unwrap();
    if let Some(r) = m["reason_code"].as_str() {
        writeln!(txt, "reason     {r}: {}", m["reason"].as_str().unwrap_or("")).unwrap();
    }
    let checks = m["checks"].as_array().cloned().unwrap_or_default();
    if !checks.is_empty() {
        writeln!(txt, "\nchecks").unwrap();
        for c in &checks {
            writeln!(
                txt,
                "  {:4} {:40} value={} tol={} {}",
                if c["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" },
                c["name"].as_str().unwrap_or(""),
                num(&c["value"]),
                num(&c["tolerance"]),
                c["detail"].as_str().unwrap_or("")
            )
            .unwrap();
        }
    }
    let mut numbers = json!({ "checks": checks });

    if has("trilinear.json") {
        let t = load_json(&dir.join("trilinear.json"))?;
        let mut csv = String::from("label,q,value,abs_sum,predicted,slope\n");
        writeln!(txt, "\ntrilinear slopes").unwrap();
        for r in t["reports"].as_array().into_iter().flatten() {
            writeln!(
                txt,
                "  {:18} slope={} predicted={} residual={}",
                r["label"].as_str().unwrap_or(""),
                num(&r["slope"]),
                num(&r["predicted_exponent"]),
                num(&r["residual"])
            )
            .unwrap();
            for s in r["shells"].as_array().into_iter().flatten() {
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    r["label"].as_str().unwrap_or(""),
                    s["q"],
                    csv_num(&s["value"]),
                    csv_num(&s["abs_sum"]),
                    csv_num(&r["predicted_exponent"]),
                    csv_num(&r["slope"])
                )
                .unwrap();
            }
        }
        out.artifacts.push(Artifact::Text("slope_fits.csv".into(), csv));
        numbers["trilinear"] = t["reports"].clone();
    }
    if has("norms.json") {
        let t = load_json(&dir.join("norms.json"))?;
        writeln!(txt, "\nnorm tables").unwrap();
        for tab in t["tables"].as_array().into_iter().flatten() {
            writeln!(
                txt,
                "  {:8} {:6} r={:4} rows={} ratio={} slope={} predicted={}",
                tab["shells"].as_str().unwrap_or(""),
                tab["piece"].as_str().unwrap_or(""),
                csv_num(&tab["r"]),
                tab["rows"].as_array().map_or(0, Vec::len),
                num(&tab["ratio"]),
                num(&tab["slope"]),
                num(&tab["predicted_slope"])
            )
            .unwrap();
        }
        numbers["norms"] = t["tables"].clone();
    }
    if has("region.json") && has("region.csv") {
        let t = load_json(&dir.join("region.json"))?;
        writeln!(
            txt,
            "\nregion {} resolution={} admissible_cells={} area={}",
            t["mode"].as_str().unwrap_or(""),
            t["resolution"],
            t["admissible_cells"],
            num(&t["area"])
        )
        .unwrap();
        let scatter: String = fs::read_to_string(dir.join("region.csv"))
            .map_err(Failure::io)?
            .lines()
            .enumerate()
            .filter(|(i, l)| *i == 0 || l.split(',').nth(4) == Some("1"))
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        out.artifacts.push(Artifact::Text("region_scatter.csv".into(), scatter));
        numbers["region"] = json!({ "area": t["area"], "cells": t["admissible_cells"] });
    }
    if has("history.json") {
        let h = load_json(&dir.join("history.json"))?;
        let mut csv = String::from("t,q,energy_u,energy_b\n");
        let recs = h["records"].as_array().cloned().unwrap_or_default();
        for r in &recs {
            for s in r["shells"].as_array().into_iter().flatten() {
                writeln!(csv, "{},{},{},{}", csv_num(&r["t"]), s["q"], csv_num(&s["energy_u"]), csv_num(&s["energy_b"]))
                    .unwrap();
            }
        }
        if let (Some(a), Some(b)) = (recs.first(), recs.last()) {
            writeln!(
                txt,
                "\nhistory records={} t={}..{} E_u {} -> {} E_b {} -> {}",
                recs.len(),
                num(&a["t"]),
                num(&b["t"]),
                num(&a["energy_u"]),
                num(&b["energy_u"]),
                num(&a["energy_b"]),
                num(&b["energy_b"])
            )
            .unwrap();
        }
        out.artifacts.push(Artifact::Text("shell_energy.csv".into(), csv));
        numbers["history_records"] = json!(recs.len());
    }
    if has("summary.json") {
        let s = load_json(&dir.join("summary.json"))?;
        writeln!(txt, "energy balance residual {}", num(&s["energy_balance_residual"])).unwrap();
        numbers["summary"] = s;
    }
    out.artifacts.push(Artifact::Text("report.txt".into(), txt));
    out.numbers = numbers;
    Ok(out)
}
