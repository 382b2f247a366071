//! Run reports (JSON) and curve tables (CSV).

use std::io::Write;
use std::path::{Path, PathBuf};

use fockbound_core::verifier::{CheckResult, ConvergenceCurve, WitnessCurve};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// `<command>-report.json`.
pub fn report_file(command: &str) -> String {
    format!("{command}-report.json")
}

/// `<command>-timing.json`, kept apart so the report stays byte-identical
/// across reruns.
pub fn timing_file(command: &str) -> String {
    format!("{command}-timing.json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub name: String,
    pub csv: String,
    pub curve: ConvergenceCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub name: String,
    pub csv: String,
    pub curve: WitnessCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<CurveRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divergence: Vec<WitnessRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub schema_version: u32,
    pub command: String,
    pub wall_seconds: f64,
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = PathBuf::from(path);
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    tmp.set_file_name(name);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

/// 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Two-column table with a header row.
pub fn csv_bytes(header: [&str; 2], rows: impl IntoIterator<Item = (usize, f64)>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for (m, v) in rows {
        w.write_record([m.to_string(), format_value(v)])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn converge_csv(curve: &ConvergenceCurve) -> Vec<u8> {
    csv_bytes(
        ["M", "error"],
        curve
            .m_values
            .iter()
            .copied()
            .zip(curve.errors.iter().copied()),
    )
}

pub fn diverge_csv(curve: &WitnessCurve) -> Vec<u8> {
    csv_bytes(
        ["M", "value"],
        curve
            .m_values
            .iter()
            .copied()
            .zip(curve.values.iter().copied()),
    )
}
