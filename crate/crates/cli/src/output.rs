//! Tables, CSV/JSON rendering and run manifests.
//!
//! Floats go out as `{:.16e}` (17 significant digits, `.` decimal point) and
//! lines end in `\n`, so equal inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{hash_pairs, Format, RunConfig, CANONICAL_ORDER};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Missing => Value::Null,
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of one subcommand: a table plus scalar summary entries.
#[derive(Debug, Clone)]
pub struct Report {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Report {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).expect("summary values serialize"),
        );
    }

    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut s = format!("# hyperscatter {VERSION} {} config_hash={config_hash}\n", self.name);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, config_hash: &str) -> Value {
        json!({
            "subcommand": self.name,
            "version": VERSION,
            "config_hash": config_hash,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "summary": self.summary,
        })
    }

    /// Human-readable summary, one `key = value` per line.
    pub fn summary_text(&self) -> String {
        self.summary
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: Map<String, Value>,
    pub config_hash: String,
    pub csv_file: String,
    pub csv_sha256: String,
    pub summary: Map<String, Value>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn config_echo(cfg: &RunConfig) -> Map<String, Value> {
    cfg.canonical_pairs()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect()
}

/// Write the report as `<dir>/<name>.csv` plus the `<dir>/<name>.json`
/// manifest; returns both paths.
pub fn write_artifacts(report: &Report, cfg: &RunConfig, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(dir)?;
    let hash = cfg.hash();
    let csv = report.to_csv(&hash);
    let csv_name = format!("{}.csv", report.name);
    let csv_path = dir.join(&csv_name);
    fs::write(&csv_path, &csv)?;
    let manifest = Manifest {
        tool: "hyperscatter".into(),
        version: VERSION.into(),
        subcommand: report.name.into(),
        config: config_echo(cfg),
        config_hash: hash,
        csv_file: csv_name,
        csv_sha256: sha256_hex(csv.as_bytes()),
        summary: report.summary.clone(),
    };
    let json_path = dir.join(format!("{}.json", report.name));
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&json_path, text)?;
    Ok((csv_path, json_path))
}

/// Render to stdout in the configured format.
pub fn render(report: &Report, cfg: &RunConfig) -> String {
    let hash = cfg.hash();
    match cfg.format {
        Format::Csv => {
            let mut s: String = report.summary_text().lines().map(|l| format!("# {l}\n")).collect();
            s.push_str(&report.to_csv(&hash));
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json(&hash)).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

/// Check a manifest against the CSV next to it: the file hash must match and
/// the CSV header must carry the manifest's config hash.
pub fn verify_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = fs::read_to_string(path)?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| CliError::Verify(format!("{}: not a manifest: {e}", path.display())))?;
    let csv_path = path.parent().unwrap_or_else(|| Path::new(".")).join(&manifest.csv_file);
    let csv = fs::read(&csv_path)?;
    let actual = sha256_hex(&csv);
    if actual != manifest.csv_sha256 {
        return Err(CliError::Verify(format!(
            "{}: sha256 {actual} differs from manifest {}",
            csv_path.display(),
            manifest.csv_sha256
        )));
    }
    let first = csv.split(|&b| b == b'\n').next().unwrap_or_default();
    let header = String::from_utf8_lossy(first);
    let tag = format!("config_hash={}", manifest.config_hash);
    if !header.ends_with(&tag) {
        return Err(CliError::Verify(format!(
            "{}: header `{header}` does not carry {tag}",
            csv_path.display()
        )));
    }
    // the echoed configuration must hash to the recorded value
    let mut pairs = Vec::with_capacity(CANONICAL_ORDER.len());
    for key in CANONICAL_ORDER {
        let v = manifest
            .config
            .get(*key)
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Verify(format!("manifest config lacks `{key}`")))?;
        pairs.push((*key, v));
    }
    let rehash = hash_pairs(pairs.into_iter());
    if rehash != manifest.config_hash {
        return Err(CliError::Verify(format!(
            "config echo hashes to {rehash}, manifest records {}",
            manifest.config_hash
        )));
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new("demo", &["a", "b"]);
        r.push(vec![Cell::Num(1.0), Cell::Missing]);
        let csv = r.to_csv("abc");
        assert_eq!(csv, "# hyperscatter 0.1.0 demo config_hash=abc\na,b\n1.0000000000000000e0,\n");
    }
}
