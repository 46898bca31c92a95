//! Aggregation of a finished run directory into `report.json`.

use crate::acceptance::Outcome;
use crate::error::{CliError, Stage};
use crate::studies::{Manifest, MANIFEST};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use vortexlab::dynamics::ExperimentReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub epsilon: f64,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub weak_residual_a: f64,
    pub weak_residual_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub manifest: Manifest,
    /// Pass/fail rows with their measured margins, when the run is an
    /// acceptance run.
    pub acceptance: Option<Vec<Outcome>>,
    pub ladder: Option<Vec<LadderEntry>>,
    pub tables: BTreeMap<String, Table>,
    pub documents: BTreeMap<String, Value>,
    /// Byte sizes of the raw float64 payloads.
    pub arrays: BTreeMap<String, u64>,
}

fn incomplete(msg: impl Into<String>) -> CliError {
    CliError::IncompleteRun(msg.into())
}

fn parse_csv(text: &str) -> Table {
    let mut lines = text.lines();
    let columns = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|c| match c.parse::<f64>() {
                    Ok(v) if v.is_finite() => serde_json::json!(v),
                    _ => Value::String(c.to_string()),
                })
                .collect()
        })
        .collect();
    Table { columns, rows }
}

/// Collects every artifact listed in the manifest of `run_dir`.
pub fn export_report(run_dir: &Path) -> Result<Report, CliError> {
    let manifest_path = run_dir.join(MANIFEST);
    let text = std::fs::read_to_string(&manifest_path)
        .map_err(|_| incomplete(format!("{} has no {MANIFEST}", run_dir.display())))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| incomplete(format!("{}: {e}", manifest_path.display())))?;
    let mut report = Report {
        manifest: manifest.clone(),
        acceptance: None,
        ladder: None,
        tables: BTreeMap::new(),
        documents: BTreeMap::new(),
        arrays: BTreeMap::new(),
    };
    for name in &manifest.files {
        let path = run_dir.join(name);
        let missing = || incomplete(format!("missing artifact {name}"));
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
        match ext {
            "f64" => {
                let len = std::fs::metadata(&path).map_err(|_| missing())?.len();
                report.arrays.insert(name.clone(), len);
            }
            "csv" => {
                let text = std::fs::read_to_string(&path).map_err(|_| missing())?;
                report.tables.insert(name.clone(), parse_csv(&text));
            }
            "json" => {
                let text = std::fs::read_to_string(&path).map_err(|_| missing())?;
                let value: Value =
                    serde_json::from_str(&text).map_err(|e| incomplete(format!("{name}: {e}")))?;
                report.documents.insert(name.clone(), value);
            }
            _ => {
                if !path.is_file() {
                    return Err(missing());
                }
            }
        }
    }
    if let Some(v) = report.documents.remove("acceptance.json") {
        report.acceptance = Some(serde_json::from_value(v).map_err(|e| incomplete(format!("acceptance.json: {e}")))?);
    }
    if let Some(v) = report.documents.get("nonuniq.json") {
        let rep: ExperimentReport =
            serde_json::from_value(v.clone()).map_err(|e| incomplete(format!("nonuniq.json: {e}")))?;
        report.ladder = Some(
            rep.rows
                .iter()
                .map(|r| LadderEntry {
                    epsilon: r.epsilon,
                    initial_distance: r.initial_distance,
                    final_distance: r.points.last().map_or(f64::NAN, |p| p.distance),
                    weak_residual_a: r.weak_residual_a,
                    weak_residual_b: r.weak_residual_b,
                })
                .collect(),
        );
    }
    Ok(report)
}

/// Writes the report next to the artifacts as `report.json`.
pub fn write_report(run_dir: &Path) -> Result<PathBuf, CliError> {
    let report = export_report(run_dir)?;
    let path = run_dir.join("report.json");
    let text = serde_json::to_string_pretty(&report).stage("write")?;
    std::fs::write(&path, text + "\n").stage("write")?;
    Ok(path)
}
