//! CSV tables and the run metadata. Floats are written in their shortest
//! round-trip form, so identical runs give identical bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{hex, ScenarioConfig};
use crate::CliError;

/// One output file. `None` cells are written empty.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(fmt_f64).unwrap_or_default()))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Everything a scenario produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub summary: Value,
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
    rows: usize,
    columns: Vec<String>,
}

/// Shortest round-trip text, in exponent form for very small or large values.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Time as it appears in file names.
pub fn time_tag(t: f64) -> String {
    format!("t{t}")
}

/// Write the tables and `metadata.json` into `dir`; returns the metadata.
pub fn write_run(dir: &Path, cfg: &ScenarioConfig, out: &RunOutput, warnings: &[String]) -> Result<Value, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for table in &out.tables {
        let bytes = table.to_csv()?;
        let path = dir.join(&table.name);
        fs::write(&path, &bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        files.push(FileEntry {
            name: table.name.clone(),
            sha256: hex(&Sha256::digest(&bytes)),
            rows: table.rows.len(),
            columns: table.columns.clone(),
        });
    }
    let meta = json!({
        "tool": "whitham",
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": cfg.name().as_str(),
        "config": cfg.resolved(),
        "config_sha256": cfg.hash(),
        "files": files,
        "warnings": warnings,
        "summary": out.summary,
    });
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    fs::write(dir.join("metadata.json"), text)?;
    Ok(meta)
}
