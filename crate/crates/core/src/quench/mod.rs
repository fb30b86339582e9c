// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Loading a chiral state at φ_e = ±2π, the sudden quench to φ_e = 0,
//! and everything measured on the resulting current series.

mod analysis;
mod scan;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use analysis::{
    first_minimum, fit_power_law, half_life, oscillation_frequency, peak_after_half_life,
    running_alpha, PowerLawFit,
};
pub use scan::{
    continuum_scan, halflife_scan, ConvergenceReport, ConvergenceStep, HalfLifeScan, ScanConfig,
    ScanPoint,
};

use crate::error::{invalid, Error, Result};
use crate::lattice::{Basis, LinearMap, PhaseGrid, WaveFunction};
use crate::ring::{
    build_hamiltonian, build_harmonic_hamiltonian, chiral_current_map, chirality_chi,
    project_physical, RingParams,
};
use crate::solver::{
    lowest_eigenpairs, lowest_eigenpairs_constrained, propagate_observed, EigenConfig,
    PropagationStats, PropagatorConfig,
};

/// Samples per harmonic period 2π/√(12 E_J E_C).
pub const SAMPLES_PER_PERIOD: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuenchModel {
    /// Full cosine potential, restricted to the physical sector.
    Full,
    /// Quadratic potential about the flux-dependent minimum.
    Harmonic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchConfig {
    pub model: QuenchModel,
    /// Emission interval; defaults to the harmonic period over 40.
    pub sample_dt: Option<f64>,
    pub eigen: EigenConfig,
    /// `dt` here is ignored in favour of the sampling interval.
    pub propagator: PropagatorConfig,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        Self {
            model: QuenchModel::Full,
            sample_dt: None,
            eigen: EigenConfig::default(),
            propagator: PropagatorConfig::default(),
        }
    }
}

/// (1/40)·2π/√(12 E_J E_C).
pub fn sample_interval(params: &RingParams) -> Result<f64> {
    if !(params.e_c > 0.0) {
        return Err(invalid("e_c", "sampling cadence needs E_C > 0"));
    }
    Ok(2.0 * PI / (12.0 * params.e_j * params.e_c).sqrt() / SAMPLES_PER_PERIOD)
}

#[derive(Clone, Debug)]
pub struct LoadedState {
    /// Ground state of H(φ_e), in the Hamiltonian's basis.
    pub state: WaveFunction,
    pub energy: f64,
    pub chirality: f64,
    pub residual: f64,
    pub seed: u64,
}

fn hamiltonian(
    params: &RingParams,
    grid: PhaseGrid,
    model: QuenchModel,
) -> Result<Box<dyn LinearMap>> {
    Ok(match model {
        QuenchModel::Full => Box::new(build_hamiltonian(params, grid)?),
        QuenchModel::Harmonic => Box::new(build_harmonic_hamiltonian(params, grid)?),
    })
}

/// ⟨χ⟩ of a normalized state.
pub fn chirality_expectation(psi: &WaveFunction, n: i64) -> Result<f64> {
    let chi = chirality_chi(psi.grid(), n);
    let p = psi.to_basis(Basis::Phase)?;
    Ok(p.amplitudes()
        .iter()
        .zip(chi.values())
        .map(|(a, c)| a.norm_sqr() * c.re)
        .sum())
}

/// ⟨I_ch(φ_e)⟩ of a normalized state.
pub fn current_expectation(psi: &WaveFunction, phi_e: f64) -> Result<f64> {
    let op = chiral_current_map(psi.grid(), phi_e);
    let p = psi.to_basis(Basis::Phase)?;
    Ok(p.amplitudes()
        .iter()
        .zip(op.values())
        .map(|(a, c)| a.norm_sqr() * c.re)
        .sum())
}

/// True when φ_e = 2πk with the ground branch expected to be chiral.
fn expects_chiral(params: &RingParams) -> bool {
    let k = (params.phi_e / (2.0 * PI)).round();
    (params.phi_e - 2.0 * PI * k).abs() < 1e-9
        && (k as i64).rem_euclid(3) != 0
        && params.n.rem_euclid(3) != 0
}

/// Ground state of H(params.phi_e).
pub fn load_chiral_state(
    params: &RingParams,
    grid: PhaseGrid,
    cfg: &EigenConfig,
    model: QuenchModel,
) -> Result<LoadedState> {
    let h = hamiltonian(params, grid, model)?;
    let r = match model {
        QuenchModel::Full => {
            let basis = h.basis();
            let proj = move |v: &mut [crate::C64]| project_physical(grid, basis, v);
            lowest_eigenpairs_constrained(&*h, 1, cfg, &proj)?
        }
        QuenchModel::Harmonic => lowest_eigenpairs(&*h, 1, cfg)?,
    };
    let state = r.eigenvectors.into_iter().next().expect("one eigenpair");
    let chirality = chirality_expectation(&state, params.n)?;
    if expects_chiral(params) {
        let floor = 0.1 * (2.0 * PI * params.n as f64 / 3.0).sin().abs();
        if chirality.abs() <= floor {
            return Err(Error::Loading(format!(
                "|<chi>| = {:.3e} not above {floor:.3e} at phi_e = {}",
                chirality.abs(),
                params.phi_e
            )));
        }
    }
    Ok(LoadedState {
        state,
        energy: r.eigenvalues[0],
        chirality,
        residual: r.residuals[0],
        seed: r.seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchSample {
    pub t: f64,
    pub current: f64,
    pub norm: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuenchMetadata {
    pub model: QuenchModel,
    pub eigen: EigenConfig,
    pub propagator: PropagatorConfig,
    pub loaded_energy: f64,
    pub loaded_chirality: f64,
    pub loaded_residual: f64,
    /// ⟨I_ch(0)⟩ on the loaded state, computed statically.
    pub static_current: f64,
    /// max |E(t) − E(0)| / max(|E(0)|, 1).
    pub energy_drift: f64,
    pub stats: PropagationStats,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuenchRun {
    /// Loading parameters (φ_e is the loading flux).
    pub params: RingParams,
    pub l: usize,
    pub series: Vec<QuenchSample>,
    pub tau: Option<f64>,
    pub metadata: QuenchMetadata,
}

impl QuenchRun {
    pub fn current_series(&self) -> Vec<(f64, f64)> {
        self.series.iter().map(|s| (s.t, s.current)).collect()
    }
}

/// Loads at `params.phi_e`, switches the flux off and records ⟨I_ch(0)⟩(t).
pub fn run_quench(
    params: &RingParams,
    grid: PhaseGrid,
    t_final: f64,
    cfg: &QuenchConfig,
) -> Result<QuenchRun> {
    let loaded = load_chiral_state(params, grid, &cfg.eigen, cfg.model)?;
    let after = params.with_flux(0.0);
    let h = hamiltonian(&after, grid, cfg.model)?;
    let dt = match cfg.sample_dt {
        Some(dt) => dt,
        None => sample_interval(params)?,
    };
    let prop = PropagatorConfig {
        dt,
        ..cfg.propagator.clone()
    };
    let current_op = chiral_current_map(grid, 0.0);
    let static_current = current_expectation(&loaded.state, 0.0)?;

    let mut series = Vec::new();
    let mut observe = |t: f64, psi: &WaveFunction| -> Result<()> {
        let energy = h.expectation_raw(psi.amplitudes()).re;
        let phase = psi.to_basis(Basis::Phase)?;
        let current = phase
            .amplitudes()
            .iter()
            .zip(current_op.values())
            .map(|(a, c)| a.norm_sqr() * c.re)
            .sum();
        series.push(QuenchSample {
            t,
            current,
            norm: psi.norm(),
            energy,
        });
        Ok(())
    };
    let stats = propagate_observed(&*h, &loaded.state, t_final, &prop, &mut observe)?;
    let e0 = series[0].energy;
    let energy_drift = series
        .iter()
        .map(|s| (s.energy - e0).abs())
        .fold(0.0, f64::max)
        / e0.abs().max(1.0);
    let tau = half_life(&series.iter().map(|s| (s.t, s.current)).collect::<Vec<_>>());
    Ok(QuenchRun {
        params: params.clone(),
        l: grid.len(),
        series,
        tau,
        metadata: QuenchMetadata {
            model: cfg.model,
            eigen: cfg.eigen.clone(),
            propagator: prop,
            loaded_energy: loaded.energy,
            loaded_chirality: loaded.chirality,
            loaded_residual: loaded.residual,
            static_current,
            energy_drift,
            stats,
        },
    })
}
