// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Three resonators a, b, c coupled through the loaded ring.
//!
//! In the single-excitation subspace the model is a 3×3 circulant with
//! on-site energy ω_r + 3g and hopping g·e^{∓i2π/3} around the loop.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub omega_r: f64,
    pub g: f64,
    /// +1 for the |N, 2π/3, −2π/3⟩ plaquette state, −1 for its partner.
    pub chirality_sign: i8,
}

impl EffectiveParams {
    pub fn new(omega_r: f64, g: f64, chirality_sign: i8) -> Result<Self> {
        let p = Self {
            omega_r,
            g,
            chirality_sign,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_r > 0.0 && self.omega_r.is_finite()) {
            return Err(invalid("omega_r", "must be positive"));
        }
        if !self.g.is_finite() {
            return Err(invalid("g", "must be finite"));
        }
        if self.chirality_sign != 1 && self.chirality_sign != -1 {
            return Err(invalid("chirality_sign", "must be +1 or -1"));
        }
        Ok(())
    }

    pub fn flipped(&self) -> Self {
        Self {
            chirality_sign: -self.chirality_sign,
            ..*self
        }
    }

    /// Hopping amplitude for a → b (and b → c, c → a).
    pub fn hopping(&self) -> C64 {
        C64::from_polar(self.g, -f64::from(self.chirality_sign) * 2.0 * PI / 3.0)
    }

    /// Recurrence time of all populations, 2π/(3|g|).
    pub fn period(&self) -> f64 {
        2.0 * PI / (3.0 * self.g.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingForm {
    /// ½(E_J^r)² / [E_N(1 − (ω_r/E_N − 2N)²)].
    Full,
    /// ω_r → 0 limit of `Full`, ½(E_J^r)² / [E_N(1 − 4N²)].
    SmallOmega,
    /// (E_J^r)² / [E_N(1 − (ω_r/E_N − 2N)²)], without the ½.
    Unhalved,
}

/// Hopping energy generated by the ring at second order.
pub fn coupling_g(e_j_r: f64, e_n: f64, omega_r: f64, n: i64, form: CouplingForm) -> Result<f64> {
    if !(e_n > 0.0) {
        return Err(invalid("e_n", "must be positive"));
    }
    let x = match form {
        CouplingForm::SmallOmega => -2.0 * n as f64,
        _ => omega_r / e_n - 2.0 * n as f64,
    };
    let denom = e_n * (1.0 - x * x);
    if (1.0 - x * x).abs() < 1e-12 {
        return Err(Error::ResonancePole {
            ratio: omega_r / e_n,
        });
    }
    let g = e_j_r * e_j_r / denom;
    Ok(match form {
        CouplingForm::Unhalved => g,
        _ => 0.5 * g,
    })
}

/// Single-excitation Hamiltonian in the (a, b, c) basis.
pub fn effective_hamiltonian(p: &EffectiveParams) -> Matrix3<C64> {
    let d = C64::new(p.omega_r + 3.0 * p.g, 0.0);
    let h = p.hopping();
    let mut m = Matrix3::from_diagonal_element(d);
    for j in 0..3 {
        let next = (j + 1) % 3;
        m[(next, j)] = h;
        m[(j, next)] = h.conj();
    }
    m
}

/// Ω_k = ω_r + 3g + 2g cos(2πk/3 + s·2π/3) for k = −1, 0, 1.
pub fn eigenfrequencies(p: &EffectiveParams) -> [f64; 3] {
    let s = f64::from(p.chirality_sign);
    [-1.0, 0.0, 1.0].map(|k: f64| {
        p.omega_r + 3.0 * p.g + 2.0 * p.g * (2.0 * PI * k / 3.0 + s * 2.0 * PI / 3.0).cos()
    })
}

/// Eigenvector paired with `eigenfrequencies()[k + 1]`: components e^{i2πkj/3}/√3.
pub fn eigenmode(k: i64) -> Vector3<C64> {
    Vector3::from_fn(|j, _| {
        C64::from_polar(1.0 / 3f64.sqrt(), 2.0 * PI * (k * j as i64) as f64 / 3.0)
    })
}

/// Amplitudes (c_a, c_b, c_c) in the single-excitation subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleExcitationState {
    pub amps: [C64; 3],
}

impl SingleExcitationState {
    pub fn new(amps: [C64; 3]) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-12 {
            return Err(invalid("amps", format!("norm^2 = {n}, expected 1")));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(amps: [C64; 3]) -> Result<Self> {
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("amps", "zero or non-finite vector"));
        }
        Ok(Self {
            amps: amps.map(|a| a / n),
        })
    }

    /// |100⟩, |010⟩ or |001⟩.
    pub fn site(i: usize) -> Self {
        let mut amps = [C64::new(0.0, 0.0); 3];
        amps[i % 3] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// (|100⟩ − |010⟩)/√2.
    pub fn antisymmetric_ab() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amps: [C64::new(r, 0.0), C64::new(-r, 0.0), C64::new(0.0, 0.0)],
        }
    }

    /// (|100⟩ + |010⟩)/√2.
    pub fn symmetric_ab() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amps: [C64::new(r, 0.0), C64::new(r, 0.0), C64::new(0.0, 0.0)],
        }
    }

    pub fn populations(&self) -> [f64; 3] {
        self.amps.map(|a| a.norm_sqr())
    }
}

/// e^{−iH_e t}ψ₀ by spectral decomposition.
pub fn evolve(p: &EffectiveParams, psi: &SingleExcitationState, t: f64) -> SingleExcitationState {
    let omegas = eigenfrequencies(p);
    let v = Vector3::from(psi.amps);
    let mut out = Vector3::<C64>::zeros();
    for (idx, k) in (-1..=1).enumerate() {
        let u = eigenmode(k);
        let c = u.dotc(&v);
        out += u * (c * C64::from_polar(1.0, -omegas[idx] * t));
    }
    SingleExcitationState {
        amps: [out[0], out[1], out[2]],
    }
}

/// Rows of (t, P_a, P_b, P_c).
pub fn circulation(
    p: &EffectiveParams,
    initial: &SingleExcitationState,
    times: &[f64],
) -> Result<Vec<[f64; 4]>> {
    p.validate()?;
    SingleExcitationState::new(initial.amps)?;
    Ok(times
        .iter()
        .map(|&t| {
            let pop = evolve(p, initial, t).populations();
            [t, pop[0], pop[1], pop[2]]
        })
        .collect())
}

/// Resonator indices of successive local population maxima, consecutive
/// repeats collapsed.
pub fn maxima_order(series: &[[f64; 4]]) -> Vec<usize> {
    let mut events: Vec<(f64, usize)> = Vec::new();
    for r in 0..3 {
        for w in series.windows(3) {
            let (a, b, c) = (w[0][r + 1], w[1][r + 1], w[2][r + 1]);
            if b > a && b >= c && b > 1e-6 {
                events.push((w[1][0], r));
            }
        }
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut order: Vec<usize> = Vec::new();
    for (_, r) in events {
        if order.last() != Some(&r) {
            order.push(r);
        }
    }
    order
}

/// +1 when maxima travel a → b → c, −1 for a → c → b, 0 when neither dominates.
pub fn circulation_direction(order: &[usize]) -> i32 {
    let mut score = 0i32;
    for w in order.windows(2) {
        match (w[1] + 3 - w[0]) % 3 {
            1 => score += 1,
            2 => score -= 1,
            _ => {}
        }
    }
    score.signum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> EffectiveParams {
        EffectiveParams::new(1.0, 0.5, 1).unwrap()
    }

    #[test]
    fn coupling_limits() {
        assert_eq!(
            coupling_g(0.0, 50.0, 1.0, 1, CouplingForm::Full).unwrap(),
            0.0
        );
        let g0 = coupling_g(2.0, 50.0, 0.0, 1, CouplingForm::Full).unwrap();
        assert!((g0 + 4.0 / 300.0).abs() < 1e-15);
        let small = coupling_g(2.0, 50.0, 0.05, 1, CouplingForm::SmallOmega).unwrap();
        assert_eq!(small, g0);
        let full = coupling_g(2.0, 50.0, 0.05, 1, CouplingForm::Full).unwrap();
        // first order in ω_r/E_N: relative gap ≈ (4N/(1−4N²))·(ω_r/E_N)
        assert!(((full - small) / small).abs() < 2.0 * 1e-3);
        let un = coupling_g(2.0, 50.0, 0.05, 1, CouplingForm::Unhalved).unwrap();
        assert!((un / full - 2.0).abs() < 1e-14);
    }

    #[test]
    fn coupling_pole() {
        let e = coupling_g(1.0, 10.0, 10.0, 1, CouplingForm::Full).unwrap_err();
        assert!(matches!(e, Error::ResonancePole { .. }));
        assert!(coupling_g(1.0, 10.0, 30.0, 1, CouplingForm::Full).is_err());
    }

    #[test]
    fn spectrum_matches_dense() {
        for p in [
            params(),
            params().flipped(),
            EffectiveParams::new(2.0, -0.3, 1).unwrap(),
        ] {
            let h = effective_hamiltonian(&p);
            assert!((h - h.adjoint()).camax() < 1e-15);
            let mut dense: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            let mut ana = eigenfrequencies(&p).to_vec();
            ana.sort_by(f64::total_cmp);
            for (a, b) in dense.iter().zip(&ana) {
                assert!((a - b).abs() < 1e-12);
            }
            let tr: C64 = (0..3).map(|i| h[(i, i)]).sum();
            assert!((tr.re - 3.0 * p.omega_r - 9.0 * p.g).abs() < 1e-12);
            for (idx, k) in (-1..=1).enumerate() {
                let u = eigenmode(k);
                assert!((h * u - u * C64::new(eigenfrequencies(&p)[idx], 0.0)).norm() < 1e-12);
            }
        }
        let w = eigenfrequencies(&params());
        let mut s = w.to_vec();
        s.sort_by(f64::total_cmp);
        assert!(
            (s[0] - 2.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12 && (s[2] - 3.5).abs() < 1e-12
        );
    }

    #[test]
    fn flip_conjugates() {
        let a = effective_hamiltonian(&params());
        let b = effective_hamiltonian(&params().flipped());
        assert!((a.map(|z| z.conj()) - b).camax() < 1e-15);
    }

    #[test]
    fn site_start_is_symmetric_and_periodic() {
        let p = params();
        let ts: Vec<f64> = (0..400).map(|i| i as f64 * 0.013).collect();
        let s = circulation(&p, &SingleExcitationState::site(0), &ts).unwrap();
        assert!((s[0][1] - 1.0).abs() < 1e-14 && s[0][2] < 1e-14 && s[0][3] < 1e-14);
        for r in &s {
            assert!((r[2] - r[3]).abs() < 1e-12);
            assert!((r[1] + r[2] + r[3] - 1.0).abs() < 1e-12);
        }
        let psi = SingleExcitationState::antisymmetric_ab();
        for &t in &ts[..50] {
            let a = evolve(&p, &psi, t).populations();
            let b = evolve(&p, &psi, t + p.period()).populations();
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn antisymmetric_start_circulates() {
        let p = params();
        let ts: Vec<f64> = (0..=2000)
            .map(|i| i as f64 * 2.0 * p.period() / 2000.0)
            .collect();
        let fwd = maxima_order(
            &circulation(&p, &SingleExcitationState::antisymmetric_ab(), &ts).unwrap(),
        );
        let bwd = maxima_order(
            &circulation(
                &p.flipped(),
                &SingleExcitationState::antisymmetric_ab(),
                &ts,
            )
            .unwrap(),
        );
        let d = circulation_direction(&fwd);
        assert_ne!(d, 0, "{fwd:?}");
        assert_eq!(circulation_direction(&bwd), -d, "{bwd:?}");
    }

    #[test]
    fn rejects_unnormalized() {
        let bad = SingleExcitationState {
            amps: [C64::new(1.0, 0.0); 3],
        };
        assert!(circulation(&params(), &bad, &[0.0]).is_err());
        assert!(EffectiveParams::new(-1.0, 0.1, 1).is_err());
        assert!(EffectiveParams::new(1.0, 0.1, 0).is_err());
    }
}
