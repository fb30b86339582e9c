// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Artifact layout `<out>/<experiment>/<hash>/{data.csv, meta.json}`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Rows of already formatted cells under a fixed header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal; scientific outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub experiment: String,
    pub seed: Option<u64>,
    pub solver_seed: u64,
    pub threads: usize,
    pub energy_convention: String,
    /// rad/ns per GHz.
    pub energy_scale: f64,
    pub config: Value,
    /// Derived inputs in rad/ns.
    pub converted: Value,
    pub wall_time_s: f64,
    pub summary: Value,
    pub verify: Option<Value>,
}

/// Creates the run directory, refusing one whose metadata records another hash.
pub fn prepare_dir(root: &Path, experiment: &str, hash: &str) -> Result<PathBuf, CliError> {
    let dir = root.join(experiment).join(hash);
    let meta = dir.join("meta.json");
    if meta.exists() {
        let text = fs::read_to_string(&meta)?;
        let old: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("unreadable {}: {e}", meta.display())))?;
        match old.get("config_hash").and_then(Value::as_str) {
            Some(h) if h == hash => {}
            other => {
                return Err(CliError::Config(format!(
                    "{} records config hash {:?}, expected {hash}",
                    meta.display(),
                    other.unwrap_or("<none>")
                )))
            }
        }
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

pub fn write_meta(dir: &Path, meta: &Meta) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(meta)?;
    fs::write(dir.join("meta.json"), text + "\n")?;
    Ok(())
}
