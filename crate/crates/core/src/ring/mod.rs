// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! The three-junction ring in (φ₊, φ₋) variables.
//!
//! φ₊ = (φ₂+φ₃)/2 and φ₋ = (φ₂−φ₃)/2 with node 1 grounded. The (φ₊, φ₋)
//! torus covers the physical (φ₂, φ₃) torus twice: the translation by
//! (π, π) is a gauge copy. Physical states are even under it, which in the
//! charge basis means n₊ + n₋ even.

mod hamiltonian;
mod perturbation;
mod symmetry;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use hamiltonian::{
    build_hamiltonian, build_harmonic_hamiltonian, build_split_hamiltonian, chiral_current,
    chiral_current_map, ring_potential, RingHamiltonian, SplitHamiltonian,
};
pub use perturbation::{
    disorder_diagonality_check, flux_fluctuation_energy, flux_fluctuation_numeric, DisorderReport,
};
pub use symmetry::{
    chirality_chi, permutation_p123, permutation_p132, plane_wave_state, project_physical,
    special_state, spectral_flow_displacement, vorticity, ParityMap, SpecialState,
};

/// Physical constants of the ring. Energies in rad/ns (ℏ = 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingParams {
    pub e_j: f64,
    pub e_c: f64,
    pub e_n: f64,
    /// Total charge N.
    pub n: i64,
    /// External flux in radians.
    pub phi_e: f64,
    /// Per-junction offsets (δE_J1, δE_J2, δE_J3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<[f64; 3]>,
}

impl RingParams {
    pub fn new(e_j: f64, e_c: f64, e_n: f64, n: i64, phi_e: f64) -> Result<Self> {
        let p = Self {
            e_j,
            e_c,
            e_n,
            n,
            phi_e,
            disorder: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j > 0.0 && self.e_j.is_finite()) {
            return Err(invalid(
                "e_j",
                format!("must be positive, got {}", self.e_j),
            ));
        }
        if !(self.e_c >= 0.0 && self.e_c.is_finite()) {
            return Err(invalid(
                "e_c",
                format!("must be non-negative, got {}", self.e_c),
            ));
        }
        if !(self.e_n >= 0.0 && self.e_n.is_finite()) {
            return Err(invalid(
                "e_n",
                format!("must be non-negative, got {}", self.e_n),
            ));
        }
        if !self.phi_e.is_finite() {
            return Err(invalid("phi_e", "must be finite"));
        }
        if let Some(d) = self.disorder {
            for (i, e) in self.junction_energies().iter().enumerate() {
                if !d[i].is_finite() || *e <= 0.0 {
                    return Err(invalid(
                        "disorder",
                        format!("junction {} energy {} not positive", i + 1, e),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Requires E_N/E_J ≥ 10 and E_J/E_C ≥ 10.
    pub fn check_regime(&self) -> Result<()> {
        self.validate()?;
        if self.e_n < 10.0 * self.e_j {
            return Err(invalid(
                "e_n",
                format!("E_N/E_J = {} < 10", self.e_n / self.e_j),
            ));
        }
        if self.e_j < 10.0 * self.e_c {
            return Err(invalid(
                "e_c",
                format!("E_J/E_C = {} < 10", self.e_j / self.e_c),
            ));
        }
        Ok(())
    }

    pub fn with_flux(&self, phi_e: f64) -> Self {
        Self {
            phi_e,
            ..self.clone()
        }
    }

    pub fn with_disorder(&self, disorder: Option<[f64; 3]>) -> Self {
        Self {
            disorder,
            ..self.clone()
        }
    }

    /// E_J ratio E_J/E_C (infinite at E_C = 0).
    pub fn ratio(&self) -> f64 {
        self.e_j / self.e_c
    }

    /// (E_J1, E_J2, E_J3).
    pub fn junction_energies(&self) -> [f64; 3] {
        let d = self.disorder.unwrap_or([0.0; 3]);
        [self.e_j + d[0], self.e_j + d[1], self.e_j + d[2]]
    }

    /// (E_N + E_C/3)N².
    pub fn constant_term(&self) -> f64 {
        let n = self.n as f64;
        (self.e_n + self.e_c / 3.0) * n * n
    }
}

/// Small-oscillation data of the harmonic model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicParams {
    /// √(12 E_J E_C).
    pub omega: f64,
    /// (φ_e/√3)(E_C/3E_J)^{1/4}.
    pub alpha: f64,
    /// |α|².
    pub mean_excitations: f64,
}

impl HarmonicParams {
    pub fn from_params(p: &RingParams) -> Self {
        let omega = (12.0 * p.e_j * p.e_c).sqrt();
        let alpha = p.phi_e / 3f64.sqrt() * (p.e_c / (3.0 * p.e_j)).powf(0.25);
        Self {
            omega,
            alpha,
            mean_excitations: alpha * alpha,
        }
    }

    /// Normal-mode frequency of the quadratic model as written,
    /// √(6 E_J E_C); both modes share it.
    pub fn mode_frequency(p: &RingParams) -> f64 {
        (6.0 * p.e_j * p.e_c).sqrt()
    }

    /// 2π/ω.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn validation() {
        assert!(RingParams::new(0.0, 1.0, 1.0, 1, 0.0).is_err());
        assert!(RingParams::new(1.0, -1.0, 1.0, 1, 0.0).is_err());
        assert!(RingParams::new(1.0, 0.0, 0.0, 1, 0.0).is_ok());
        let p = RingParams::new(10.0, 0.1, 100.0, 1, 0.0).unwrap();
        assert!(p.check_regime().is_ok());
        assert!(p.with_disorder(Some([-11.0, 0.0, 0.0])).validate().is_err());
        let weak = RingParams::new(10.0, 2.0, 100.0, 1, 0.0).unwrap();
        assert!(weak.check_regime().is_err());
    }

    #[test]
    fn harmonic_numbers() {
        let p = RingParams::new(10.0, 0.1, 100.0, 1, 2.0 * PI).unwrap();
        let h = HarmonicParams::from_params(&p);
        assert!((h.omega - 12f64.sqrt()).abs() < 1e-12);
        let want = 4.0 * PI * PI / 3.0 * (1.0f64 / 300.0).sqrt();
        assert!((h.mean_excitations - want).abs() < 1e-12);
        assert!((want - 0.760).abs() < 1e-3);
    }
}
