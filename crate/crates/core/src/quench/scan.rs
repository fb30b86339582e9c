// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Grid-refinement studies and the half-life versus E_J/E_C scan.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{fit_power_law, PowerLawFit};
use super::{run_quench, QuenchConfig, QuenchRun};
use crate::error::{invalid, Error, Result};
use crate::lattice::PhaseGrid;
use crate::ring::RingParams;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub l: usize,
    /// max_t |I_L(t) − I_prev(t)| / |I_L(0)| against the previous rung.
    pub deviation: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub steps: Vec<ConvergenceStep>,
    /// First L whose series agrees with the previous rung within tolerance.
    pub l_star: Option<usize>,
    pub tol: f64,
    /// Run at `l_star`, or at the largest L tried when nothing converged.
    pub run: QuenchRun,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.l_star.is_some()
    }
}

fn max_deviation(a: &QuenchRun, b: &QuenchRun) -> f64 {
    let i0 = b.series[0].current.abs().max(f64::MIN_POSITIVE);
    a.series
        .iter()
        .zip(&b.series)
        .map(|(x, y)| (x.current - y.current).abs())
        .fold(0.0, f64::max)
        / i0
}

/// Runs the quench on each L in turn until two consecutive rungs agree.
pub fn continuum_scan(
    params: &RingParams,
    l_list: &[usize],
    t_final: f64,
    cfg: &QuenchConfig,
    tol: f64,
) -> Result<ConvergenceReport> {
    if l_list.len() < 2 {
        return Err(invalid("l_list", "need at least two grid sizes"));
    }
    if !l_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("l_list", "grid sizes must increase"));
    }
    let mut steps = Vec::new();
    let mut prev: Option<QuenchRun> = None;
    for &l in l_list {
        let run = run_quench(params, PhaseGrid::new(l)?, t_final, cfg)?;
        let deviation = prev.as_ref().map(|p| max_deviation(p, &run));
        steps.push(ConvergenceStep {
            l,
            deviation,
            tau: run.tau,
        });
        if deviation.is_some_and(|d| d < tol) {
            return Ok(ConvergenceReport {
                steps,
                l_star: Some(l),
                tol,
                run,
            });
        }
        prev = Some(run);
    }
    Ok(ConvergenceReport {
        steps,
        l_star: None,
        tol,
        run: prev.expect("non-empty ladder"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Increasing grid sizes tried at every ratio.
    pub ladder: Vec<usize>,
    /// Tolerance on the current series between rungs, in units of I(0).
    pub tol: f64,
    /// Window length in harmonic periods 2π/√(12 E_J E_C).
    pub periods: f64,
    /// Window doublings allowed when the current never halves.
    pub max_extensions: usize,
    pub quench: QuenchConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            ladder: vec![36, 48, 60, 72, 90, 108, 132, 156, 180],
            tol: 1e-3,
            periods: 1.5,
            max_extensions: 2,
            quench: QuenchConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanPoint {
    pub ratio: f64,
    pub e_c: f64,
    pub tau: f64,
    pub l_star: Option<usize>,
    pub t_final: f64,
    pub report: ConvergenceReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfLifeScan {
    pub points: Vec<ScanPoint>,
    pub fit: PowerLawFit,
}

fn scan_point(base: &RingParams, ratio: f64, cfg: &ScanConfig) -> Result<ScanPoint> {
    let params = RingParams {
        e_c: base.e_j / ratio,
        ..base.clone()
    };
    params.validate()?;
    let period = 2.0 * PI / (12.0 * params.e_j * params.e_c).sqrt();
    let mut t_final = cfg.periods * period;
    for _ in 0..=cfg.max_extensions {
        let report = continuum_scan(&params, &cfg.ladder, t_final, &cfg.quench, cfg.tol)?;
        if let Some(tau) = report.run.tau {
            return Ok(ScanPoint {
                ratio,
                e_c: params.e_c,
                tau,
                l_star: report.l_star,
                t_final,
                report,
            });
        }
        t_final *= 2.0;
    }
    Err(Error::Fit(format!(
        "current never halved at E_J/E_C = {ratio} within t = {}",
        t_final / 2.0
    )))
}

/// τ(E_J/E_C) over `ratios` at fixed E_J, E_N, N and loading flux, then the
/// log-log fit. Ratios run in parallel.
pub fn halflife_scan(base: &RingParams, ratios: &[f64], cfg: &ScanConfig) -> Result<HalfLifeScan> {
    if ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(invalid("ratios", "must be positive"));
    }
    let points = ratios
        .par_iter()
        .map(|&r| scan_point(base, r, cfg))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(&points.iter().map(|p| (p.ratio, p.tau)).collect::<Vec<_>>())?;
    Ok(HalfLifeScan { points, fit })
}
