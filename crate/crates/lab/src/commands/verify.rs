use lab_core::construction::{build_initial, family_norm_table, verify_lemma_u0, Mode, NormOptions, ShellPiece};
use lab_core::trilinear::{nse_decomposition, verify_lemma_tril, TrilinearReport};
use serde_json::json;

use super::{attempt, fmt_opt, norm_csv, NormTableOut, Prepared};
use crate::config::{construction_condition, VerifyConfig};
use crate::store::Check;
use crate::{Artifact, Outcome};

pub fn prepare(cfg: VerifyConfig) -> Prepared {
    Prepared::new(&cfg.clone(), move || compute(&cfg))
}

fn slopes_csv(reports: &[TrilinearReport], tables: &[NormTableOut], tol: f64) -> String {
    let mut s = String::from("kind,label,predicted,slope,residual,pass\n");
    for r in reports {
        s.push_str(&format!(
            "trilinear,{},{},{},{},{}\n",
            r.label,
            r.predicted_exponent,
            fmt_opt(r.slope),
            fmt_opt(r.residual),
            r.slope.is_some_and(|v| (v - r.predicted_exponent).abs() <= tol)
        ));
    }
    for t in tables.iter().filter(|t| t.rows.len() >= 3) {
        s.push_str(&format!(
            "lp,{},{},{},,{}\n",
            t.tag(),
            t.predicted_slope,
            fmt_opt(t.slope),
            t.slope.is_some_and(|v| (v - t.predicted_slope).abs() <= tol)
        ));
    }
    s
}

pub fn compute(cfg: &VerifyConfig) -> Outcome {
    if let Some(f) = construction_condition(&cfg.construction) {
        return Outcome::failed(f);
    }
    let p = &cfg.construction;
    let mut out = Outcome::default();
    let data = attempt!(out, build_initial(p));
    let reports = attempt!(out, verify_lemma_tril(&data, &cfg.trilinear));
    for r in &reports {
        let dev = r.slope.map_or(f64::INFINITY, |s| (s - r.predicted_exponent).abs());
        let detail = match r.slope {
            Some(s) => format!("slope {s:.4} predicted {:.4}", r.predicted_exponent),
            None => r.note.clone().unwrap_or_default(),
        };
        out.checks
            .push(Check::at_most(format!("trilinear:{}", r.label), dev, cfg.slope_tolerance).with_detail(detail));
    }
    let decomposition = if cfg.decompose && p.mode == Mode::Nse {
        let mut v = Vec::new();
        for j in 0..data.shells.len() {
            v.push(attempt!(out, nse_decomposition(&data, j, &cfg.trilinear)));
        }
        Some(v)
    } else {
        None
    };

    let opt = NormOptions::default();
    let mut pieces = vec![ShellPiece::UTop];
    if p.mode == Mode::Mhd {
        pieces.push(ShellPiece::B);
    }
    let mut tables = Vec::new();
    for &piece in &pieces {
        for r in &cfg.norm_r {
            let t = attempt!(out, verify_lemma_u0(&data, r.0, piece, &opt));
            tables.push(NormTableOut::new(&t, "lacunary"));
            if r.0 != 2.0 {
                let qs = match piece {
                    ShellPiece::B => &cfg.family.magnetic,
                    _ => &cfg.family.velocity,
                };
                if !qs.is_empty() {
                    let t = attempt!(out, family_norm_table(p, qs, r.0, piece, &opt));
                    tables.push(NormTableOut::new(&t, "family"));
                }
            }
        }
    }
    for t in &tables {
        out.checks.extend(t.bounded_check(cfg.ratio_limit));
        if t.rows.len() >= 3 {
            out.checks.extend(t.slope_check(cfg.slope_tolerance));
        }
    }
    for &piece in &pieces {
        for r in &cfg.norm_r {
            let covered = tables
                .iter()
                .any(|t| t.piece == piece.label() && t.r.0 == r.0 && t.rows.len() >= 3);
            out.checks.push(Check::flag(format!("coverage:{}:r={}", piece.label(), r), covered));
        }
    }

    let tril = json!({ "seq": data.seq, "reports": reports, "decomposition": decomposition });
    out.artifacts.push(Artifact::json("trilinear.json", &tril));
    out.artifacts.push(Artifact::json("norms.json", &json!({ "seq": data.seq, "tables": tables })));
    out.artifacts.push(Artifact::Text("norms.csv".into(), norm_csv(&tables)));
    out.artifacts
        .push(Artifact::Text("slopes.csv".into(), slopes_csv(&reports, &tables, cfg.slope_tolerance)));
    out.numbers = json!({ "trilinear": tril, "tables": tables });
    out
}
