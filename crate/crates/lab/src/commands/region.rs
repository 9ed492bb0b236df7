use lab_core::region::{admissible, emit_region_grid_with, RegionQuery};
use serde_json::json;

use super::{attempt, fmt_f, Prepared};
use crate::config::RegionConfig;
use crate::store::Check;
use crate::{Artifact, Outcome};

pub fn prepare(cfg: RegionConfig) -> Prepared {
    Prepared::new(&cfg.clone(), move || compute(&cfg))
}

pub fn compute(cfg: &RegionConfig) -> Outcome {
    let mut out = Outcome::default();
    let grid = attempt!(out, emit_region_grid_with(cfg.resolution, cfg.mode, cfg.strictness));

    let mut csv = String::from("inv_r,s,theta,gamma,admissible,branch\n");
    for p in &grid.points {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f(p.inv_r),
            fmt_f(p.s),
            fmt_f(p.theta),
            p.gamma.map(fmt_f).unwrap_or_default(),
            p.admissible as u8,
            p.branch.map(|b| b.to_string()).unwrap_or_default()
        ));
    }
    let mut poly = String::from("inv_r,s\n");
    for [x, s] in &grid.polygon {
        poly.push_str(&format!("{},{}\n", fmt_f(*x), fmt_f(*s)));
    }

    // The figure's corners: (0, -1) lies inside, (1/2, 0) outside.
    for e in &grid.extremal {
        let inside = e.inv_r == 0.0;
        out.checks.push(
            Check::flag(format!("extremal:({},{})", e.inv_r, e.s), e.admissible == inside)
                .with_detail(format!("admissible={}", e.admissible)),
        );
    }

    let mut pts = String::from("r,theta,gamma,admissible,branch,reason\n");
    let mut verdicts = Vec::new();
    for p in &cfg.points {
        let q = RegionQuery {
            r: p.r.0,
            theta: p.theta,
            gamma: p.gamma,
        };
        let v = admissible(cfg.mode, &q, cfg.strictness);
        pts.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.r,
            p.theta,
            p.gamma.map(|g| g.to_string()).unwrap_or_default(),
            v.admissible as u8,
            v.branch.map(|b| b.to_string()).unwrap_or_default(),
            v.reason()
        ));
        verdicts.push(json!({ "point": p, "verdict": v, "reason": v.reason() }));
    }

    out.artifacts.push(Artifact::Text("region.csv".into(), csv));
    out.artifacts.push(Artifact::Text("polygon.csv".into(), poly));
    if !cfg.points.is_empty() {
        out.artifacts.push(Artifact::Text("points.csv".into(), pts));
    }
    let summary = json!({
        "mode": grid.mode,
        "resolution": grid.resolution,
        "strictness": cfg.strictness,
        "area": grid.area,
        "admissible_cells": grid.points.iter().filter(|p| p.admissible).count(),
        "extremal": grid.extremal,
        "polygon": grid.polygon,
        "points": verdicts,
    });
    out.artifacts.push(Artifact::json("region.json", &summary));
    out.numbers = summary;
    out
}
