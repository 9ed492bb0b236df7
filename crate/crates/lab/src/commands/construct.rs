use lab_core::construction::{build_initial, verify_lemma_u0, NormOptions};
use lab_core::spectral::snapshot::write_svf;
use lab_core::spectral::GridSpec;
use serde_json::json;

use super::{attempt, norm_csv, velocity_pieces, NormTableOut, Prepared};
use crate::config::{construction_condition, ConstructConfig};
use crate::store::Check;
use crate::{Artifact, Outcome};

pub fn prepare(cfg: ConstructConfig) -> Prepared {
    Prepared::new(&cfg.clone(), move || compute(&cfg))
}

pub fn compute(cfg: &ConstructConfig) -> Outcome {
    if let Some(f) = construction_condition(&cfg.construction) {
        return Outcome::failed(f);
    }
    let mut out = Outcome::default();
    let data = attempt!(out, build_initial(&cfg.construction));
    out.checks.push(Check::flag("structure", true));

    let blocks: Vec<_> = data
        .shells
        .iter()
        .map(|s| json!({ "j": s.j, "q": s.q, "blocks": s.blocks }))
        .collect();
    out.artifacts.push(Artifact::JsonGz(
        "blocks.json.gz".into(),
        json!({ "seq": data.seq, "c": cfg.construction.c, "shells": blocks }),
    ));

    let opt = NormOptions::default();
    let mut tables = Vec::new();
    for &piece in velocity_pieces(cfg.construction.mode) {
        for r in &cfg.norm_r {
            let t = attempt!(out, verify_lemma_u0(&data, r.0, piece, &opt));
            tables.push(NormTableOut::new(&t, "lacunary"));
        }
    }
    out.artifacts.push(Artifact::Text("norms.csv".into(), norm_csv(&tables)));
    out.artifacts.push(Artifact::json("norms.json", &json!({ "seq": data.seq, "tables": tables })));
    out.numbers = json!({ "seq": data.seq, "tables": tables });

    if let Some(n) = cfg.grid_n {
        let grid = attempt!(out, GridSpec::new(n));
        let gd = attempt!(out, data.on_grid(grid));
        out.checks.push(Check::flag("grid_invariants", true));
        for (name, f) in [("u0.svf", Some(&gd.u0)), ("b0.svf", gd.b0.as_ref())] {
            if let Some(f) = f {
                let mut buf = Vec::new();
                attempt!(out, write_svf(&mut buf, f));
                out.artifacts.push(Artifact::Bytes(name.into(), buf));
            }
        }
        out.numbers["energy_u0"] = json!(gd.u0.energy());
        if let Some(b) = &gd.b0 {
            out.numbers["energy_b0"] = json!(b.energy());
        }
    }
    out
}
