// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner: reads a TOML description, runs it, and writes a CSV
//! table plus JSON metadata under a directory keyed by the config hash.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use experiments::{run_experiment, Outcome};

use output::{prepare_dir, write_meta, Meta};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Worker threads; `None` keeps the ambient pool.
    pub threads: Option<usize>,
    pub verify: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub hash: String,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn data_path(&self) -> PathBuf {
        self.dir.join("data.csv")
    }

    pub fn meta_path(&self) -> PathBuf {
        self.dir.join("meta.json")
    }
}

/// Validates, runs and writes one experiment.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let hash = cfg.hash();
    let dir = prepare_dir(&opts.out, cfg.experiment.as_str(), &hash)?;
    let start = Instant::now();
    let (outcome, threads) = match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            (pool.install(|| run_experiment(cfg, opts.verify))?, n)
        }
        None => (
            run_experiment(cfg, opts.verify)?,
            rayon::current_num_threads(),
        ),
    };
    outcome.table.write_csv(&dir.join("data.csv"))?;
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: hash.clone(),
        experiment: cfg.experiment.as_str().to_string(),
        seed: cfg.seed,
        solver_seed: cfg.eigen.seed,
        threads,
        energy_convention: serde_json::to_value(cfg.energy_convention)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        energy_scale: cfg.scale(),
        config: serde_json::to_value(cfg)?,
        converted: outcome.converted.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        summary: outcome.summary.clone(),
        verify: outcome.verify.clone(),
    };
    write_meta(&dir, &meta)?;
    Ok(RunReport { dir, hash, outcome })
}

/// Loads `path`, applies a seed override and runs.
pub fn run_file(
    path: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    verify: bool,
) -> Result<RunReport, CliError> {
    let cfg = ExperimentConfig::load(path)?.with_seed(seed);
    let out = out
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    run(
        &cfg,
        &RunOptions {
            out,
            threads,
            verify,
        },
    )
}
