//! CSV tables and JSON summaries for record sets.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::manifest::ExperimentKind;
use super::store::{ExperimentRecord, Status};

/// JSON schema every summary written by [`emit_report`] conforms to.
pub const SUMMARY_SCHEMA: &str = include_str!("../../schema/summary.schema.json");

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportFiles {
    pub summary: PathBuf,
    pub tables: Vec<PathBuf>,
}

fn kind_name(kind: ExperimentKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// The summary document for a record set.
pub fn summary_json(kind: Option<ExperimentKind>, records: &[ExperimentRecord], extra: Value) -> Value {
    let ok = records.iter().filter(|r| r.status == Status::Ok).count();
    json!({
        "format": "hwave-summary/1",
        "kind": kind.map(kind_name),
        "manifest_hash": records.first().map(|r| r.manifest_hash.clone()),
        "count": records.len(),
        "ok": ok,
        "failed": records.len() - ok,
        "extra": extra,
        "records": records.iter().map(ExperimentRecord::payload).collect::<Vec<_>>(),
    })
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
    }
}

fn table(kind: ExperimentKind) -> (&'static str, Vec<(&'static str, &'static str)>) {
    // (column, pointer into {"parameters", "outputs", "refinement"})
    match kind {
        ExperimentKind::LinearDecay => (
            "decay.csv",
            vec![
                ("s", "/parameters/s"),
                ("gamma", "/parameters/gamma"),
                ("slope", "/outputs/slope"),
                ("theory", "/outputs/theory"),
                ("deviation", "/outputs/deviation"),
                ("refinement_shift", "/refinement/refinement_shift"),
            ],
        ),
        ExperimentKind::Lifespan => (
            "lifespan.csv",
            vec![
                ("gamma", "/parameters/gamma"),
                ("p", "/parameters/p"),
                ("eps", "/parameters/eps"),
                ("lifespan", "/outputs/lifespan"),
                ("threshold_shift", "/outputs/threshold_shift"),
                ("dt_shift", "/outputs/dt_shift"),
                ("r_max", "/outputs/r_max"),
                ("tau_max", "/outputs/tau_max"),
            ],
        ),
        ExperimentKind::PhaseDiagram => (
            "phase.csv",
            vec![
                ("gamma", "/parameters/gamma"),
                ("p", "/parameters/p"),
                ("class", "/outputs/class"),
                ("p_crit", "/outputs/p_crit"),
                ("p_regularity", "/outputs/p_regularity"),
                ("lifespan", "/outputs/lifespan"),
                ("xs_growth", "/outputs/xs_growth"),
            ],
        ),
        ExperimentKind::Gn => (
            "gn.csv",
            vec![
                ("s", "/parameters/s"),
                ("q", "/outputs/q"),
                ("gn_max", "/outputs/gn_max"),
                ("gn_max_refined", "/refinement/gn_max_refined"),
                ("gn_drift", "/refinement/gn_drift"),
                ("hls_max", "/outputs/hls_max"),
                ("hls_max_refined", "/refinement/hls_max_refined"),
                ("hls_drift", "/refinement/hls_drift"),
            ],
        ),
        ExperimentKind::BlowupFunctional => (
            "blowup_functional.csv",
            vec![
                ("gamma", "/parameters/gamma"),
                ("R", "/parameters/R"),
                ("integral", "/outputs/check/integral"),
                ("bound", "/outputs/check/bound"),
                ("margin", "/outputs/check/margin"),
            ],
        ),
    }
}

/// Writes `rows` (first row is the header) as CSV.
pub fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).map_err(|e| Error::Serde(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serde(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes summary.json and, for a known kind, one CSV row per record.
pub fn emit_report(
    kind: Option<ExperimentKind>,
    records: &[ExperimentRecord],
    dir: &Path,
    extra: Value,
) -> Result<ReportFiles> {
    let mut files = ReportFiles {
        summary: dir.join("summary.json"),
        tables: Vec::new(),
    };
    let summary = summary_json(kind, records, extra);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Serde(e.to_string()))?;
    write_atomic(&files.summary, text.as_bytes())?;
    if let Some(kind) = kind {
        let (name, cols) = table(kind);
        let mut rows = vec![cols.iter().map(|c| c.0.to_string()).collect::<Vec<_>>()];
        for r in records {
            let v = serde_json::to_value(r).map_err(|e| Error::Serde(e.to_string()))?;
            rows.push(cols.iter().map(|c| cell(v.pointer(c.1))).collect());
        }
        let path = dir.join(name);
        write_csv(&path, &rows)?;
        files.tables.push(path);
    }
    if kind == Some(ExperimentKind::LinearDecay) {
        for r in records {
            if let Some(path) = write_decay_trajectory(r, dir)? {
                files.tables.push(path);
            }
        }
    }
    Ok(files)
}

/// trajectory_s=<s>_gamma=<γ>.csv with columns t, h_s_norm, l2_norm.
fn write_decay_trajectory(r: &ExperimentRecord, dir: &Path) -> Result<Option<PathBuf>> {
    let tr = &r.outputs["trajectory"];
    let col = |name: &str| -> Option<Vec<f64>> {
        tr.get(name)?.as_array()?.iter().map(Value::as_f64).collect()
    };
    let (Some(t), Some(hs), Some(l2)) = (col("t"), col("h_s_norm"), col("l2_norm")) else {
        return Ok(None);
    };
    let mut rows = vec![vec!["t".to_string(), "h_s_norm".into(), "l2_norm".into()]];
    for i in 0..t.len().min(hs.len()).min(l2.len()) {
        rows.push(vec![t[i].to_string(), hs[i].to_string(), l2[i].to_string()]);
    }
    let num = |k: &str| r.parameters.get(k).and_then(Value::as_f64).unwrap_or(f64::NAN);
    let name = format!("trajectory_s={}_gamma={}.csv", num("s"), num("gamma"));
    let path = dir.join(name);
    write_csv(&path, &rows)?;
    Ok(Some(path))
}
