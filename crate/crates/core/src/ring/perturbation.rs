// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Junction disorder and flux-noise checks.

use serde::{Deserialize, Serialize};

use super::hamiltonian::ring_potential;
use super::symmetry::{special_state, SpecialState};
use super::{build_hamiltonian, RingParams};
use crate::error::{invalid, Result};
use crate::lattice::{apply_to, diag_operator, PhaseGrid};
use crate::solver::{lowest_eigenpairs, EigenConfig};

/// Second-order energy shift E_J δ²/6 for a small flux offset δ.
pub fn flux_fluctuation_energy(params: &RingParams, delta_phi_e: f64) -> Result<f64> {
    if delta_phi_e.abs() > std::f64::consts::FRAC_PI_2 {
        return Err(invalid(
            "delta_phi_e",
            format!("|{delta_phi_e}| exceeds pi/2"),
        ));
    }
    Ok(params.e_j * delta_phi_e * delta_phi_e / 6.0)
}

/// Same shift from two eigensolves at E_C = 0: E₀(δ) − E₀(0).
pub fn flux_fluctuation_numeric(
    params: &RingParams,
    grid: PhaseGrid,
    delta_phi_e: f64,
    cfg: &EigenConfig,
) -> Result<f64> {
    flux_fluctuation_energy(params, delta_phi_e)?;
    let base = RingParams {
        e_c: 0.0,
        phi_e: 0.0,
        ..params.clone()
    };
    let e0 = |phi_e: f64| -> Result<f64> {
        let h = build_hamiltonian(&base.with_flux(phi_e), grid)?;
        Ok(lowest_eigenpairs(&h, 1, cfg)?.eigenvalues[0])
    };
    Ok(e0(delta_phi_e)? - e0(0.0)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DisorderReport {
    /// Largest |⟨s_i|V|s_j⟩|, i ≠ j, over the three special states.
    pub max_off_diagonal: f64,
    /// ⟨s|V|s⟩ in the order uniform, chiral-plus, chiral-minus.
    pub diagonal: [f64; 3],
    /// −Σ_i E_Ji cos(Δφ_i) evaluated on each state's junction drops.
    pub analytic_diagonal: [f64; 3],
}

/// Projects the disordered Josephson potential onto the three special states.
pub fn disorder_diagonality_check(
    grid: PhaseGrid,
    n: i64,
    e_j: f64,
    disorder: [f64; 3],
    phi_e: f64,
) -> Result<DisorderReport> {
    let p = RingParams {
        e_j,
        e_c: 0.0,
        e_n: 0.0,
        n,
        phi_e,
        disorder: Some(disorder),
    };
    p.validate()?;
    let v = diag_operator(grid, |a, b| ring_potential(&p, a, b));
    let states = SpecialState::ALL.map(|s| special_state(grid, s));
    let images = states
        .clone()
        .map(|s| apply_to(&v, &s).expect("phase basis"));
    let mut max_off = 0.0_f64;
    let mut diagonal = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            let m = states[i].inner(&images[j])?;
            if i == j {
                diagonal[i] = m.re;
            } else {
                max_off = max_off.max(m.norm());
            }
        }
    }
    let a = phi_e / 3.0;
    let [e1, e2, e3] = p.junction_energies();
    let analytic_diagonal = SpecialState::ALL.map(|s| {
        let (p2, p3) = s.phases();
        -(e1 * (p2 - a).cos() + e2 * (p3 - p2 - a).cos() + e3 * (p3 + a).cos())
    });
    Ok(DisorderReport {
        max_off_diagonal: max_off,
        diagonal,
        analytic_diagonal,
    })
}
