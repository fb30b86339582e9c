// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Input-output scattering of three transmission lines through the
//! effective resonator triangle.
//!
//! S_{jj'} = δ_{jj'} + Σ_k f_k(ω) e^{i2π(j−j')k/3} with
//! f_k = (Γ/3)/(i(ω − Ω_k) − Γ/2). Folding the degenerate pair leaves two
//! scalars: α on the diagonal and β e^{∓i2π/3} off it.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::effective::{eigenfrequencies, eigenmode, EffectiveParams};
use crate::error::{invalid, Result};

/// Differential input mode selector for `output_powers`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    Plus,
    Minus,
}

impl InputMode {
    fn column(self) -> usize {
        match self {
            InputMode::Plus => 0,
            InputMode::Minus => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrix3 {
    pub entries: Matrix3<C64>,
    pub omega: f64,
    pub omega_r: f64,
    pub g: f64,
    pub gamma: f64,
}

impl SMatrix3 {
    /// max |S S† − 1|.
    pub fn unitarity_residual(&self) -> f64 {
        (self.entries * self.entries.adjoint() - Matrix3::identity()).camax()
    }

    /// max |S − Sᵀ|.
    pub fn asymmetry(&self) -> f64 {
        (self.entries - self.entries.transpose()).camax()
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            ..*self
        }
    }
}

fn lorentz(omega: f64, center: f64, gamma: f64) -> C64 {
    C64::new(gamma / 3.0, 0.0) / C64::new(-gamma / 2.0, omega - center)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", "must be positive"));
    }
    Ok(())
}

/// (α, β) at ω.
pub fn alpha_beta(omega: f64, omega_r: f64, g: f64, gamma: f64) -> (C64, C64) {
    let f5 = lorentz(omega, omega_r + 5.0 * g, gamma);
    let f2 = lorentz(omega, omega_r + 2.0 * g, gamma);
    (1.0 + f5 + 2.0 * f2, f5 - f2)
}

/// Closed-form S for the +2π/3 plaquette orientation.
pub fn smatrix(omega: f64, omega_r: f64, g: f64, gamma: f64) -> Result<SMatrix3> {
    check_gamma(gamma)?;
    let (a, b) = alpha_beta(omega, omega_r, g, gamma);
    let entries = Matrix3::from_fn(|j, jp| {
        if j == jp {
            a
        } else {
            b * C64::from_polar(1.0, -2.0 * PI * (j as f64 - jp as f64) / 3.0)
        }
    });
    Ok(SMatrix3 {
        entries,
        omega,
        omega_r,
        g,
        gamma,
    })
}

/// S with the plaquette orientation taken from `p`; the opposite
/// orientation is the transpose.
pub fn smatrix_oriented(omega: f64, p: &EffectiveParams, gamma: f64) -> Result<SMatrix3> {
    let s = smatrix(omega, p.omega_r, p.g, gamma)?;
    Ok(if p.chirality_sign < 0 {
        s.transpose()
    } else {
        s
    })
}

/// S assembled directly from the eigenmodes of the effective Hamiltonian.
pub fn smatrix_from_modes(omega: f64, p: &EffectiveParams, gamma: f64) -> Result<SMatrix3> {
    check_gamma(gamma)?;
    let omegas = eigenfrequencies(p);
    let mut entries = Matrix3::<C64>::identity();
    for (idx, k) in (-1..=1).enumerate() {
        let u: Vector3<C64> = eigenmode(k);
        // Γ/(i(ω−Ω)−Γ/2) |u_k⟩⟨u_k|; |u_k(j)|² = 1/3 absorbs the 1/3 in f_k.
        let f = 3.0 * lorentz(omega, omegas[idx], gamma);
        entries += u * u.adjoint() * f;
    }
    Ok(SMatrix3 {
        entries,
        omega,
        omega_r: p.omega_r,
        g: p.g,
        gamma,
    })
}

/// U mapping (b₊, b₋, b₃) inputs onto lines (1, 2, 3).
pub fn differential_unitary() -> Matrix3<C64> {
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    Matrix3::new(r, r, z, r, -r, z, z, z, C64::new(1.0, 0.0))
}

/// S̃ = S·U with columns (b₊, b₋, b₃).
pub fn differential_basis(s: &SMatrix3) -> Matrix3<C64> {
    s.entries * differential_unitary()
}

/// 24g²Γ² / ([Γ² + 4(ω−ω_r−2g)²][Γ² + 4(ω−ω_r−5g)²]).
pub fn s3_minus_closed_form(omega: f64, omega_r: f64, g: f64, gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    let d2 = omega - omega_r - 2.0 * g;
    let d5 = omega - omega_r - 5.0 * g;
    24.0 * g * g * g2 / ((g2 + 4.0 * d2 * d2) * (g2 + 4.0 * d5 * d5))
}

/// |S̃₃₋|² at ω = ω_r + 2g (equivalently ω_r + 5g): 24g²/(Γ² + 36g²).
pub fn resonance_peak(g: f64, gamma: f64) -> f64 {
    24.0 * g * g / (gamma * gamma + 36.0 * g * g)
}

/// Default probe grid: 2001 points over [ω_r − 2g − 5Γ, ω_r + 7g + 5Γ].
pub fn default_omega_grid(omega_r: f64, g: f64, gamma: f64) -> Vec<f64> {
    omega_grid(
        omega_r - 2.0 * g - 5.0 * gamma,
        omega_r + 7.0 * g + 5.0 * gamma,
        2001,
    )
}

pub fn omega_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Rows (ω, P₁, P₂, P₃) for a unit-power differential input.
pub fn output_powers(
    omega_r: f64,
    g: f64,
    gamma: f64,
    input: InputMode,
    omegas: &[f64],
) -> Result<Vec<[f64; 4]>> {
    check_gamma(gamma)?;
    omegas
        .iter()
        .map(|&w| {
            let st = differential_basis(&smatrix(w, omega_r, g, gamma)?);
            let c = input.column();
            Ok([
                w,
                st[(0, c)].norm_sqr(),
                st[(1, c)].norm_sqr(),
                st[(2, c)].norm_sqr(),
            ])
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Directionality {
    /// Numerical maximum of |S̃₃₋|² over ω.
    pub max_power: f64,
    pub argmax: f64,
    /// |S̃₃₋|² at ω = ω_r + 2g.
    pub resonance_power: f64,
    /// 24g²/(Γ² + 36g²).
    pub resonance_formula: f64,
}

fn port3_minus(omega: f64, omega_r: f64, g: f64, gamma: f64) -> f64 {
    let (_, b) = alpha_beta(omega, omega_r, g, gamma);
    1.5 * b.norm_sqr()
}

/// Maximizes |S̃₃₋|² by a grid scan followed by golden-section refinement.
pub fn directionality(omega_r: f64, g: f64, gamma: f64) -> Result<Directionality> {
    check_gamma(gamma)?;
    let grid = default_omega_grid(omega_r, g, gamma);
    let f = |w: f64| port3_minus(w, omega_r, g, gamma);
    let (mut best, mut best_w) = (f64::MIN, grid[0]);
    for &w in &grid {
        let v = f(w);
        if v > best {
            best = v;
            best_w = w;
        }
    }
    let h = grid[1] - grid[0];
    let (mut a, mut b) = (best_w - h, best_w + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + best_w.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let w = 0.5 * (a + b);
    let (max_power, argmax) = if f(w) >= best {
        (f(w), w)
    } else {
        (best, best_w)
    };
    Ok(Directionality {
        max_power,
        argmax,
        resonance_power: f(omega_r + 2.0 * g),
        resonance_formula: resonance_peak(g, gamma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WR: f64 = 1.0;
    const G: f64 = 0.5;
    const GAMMA: f64 = 0.35;

    #[test]
    fn unitary_and_nonreciprocal() {
        for w in omega_grid(-2.0, 6.0, 200) {
            let s = smatrix(w, WR, G, GAMMA).unwrap();
            assert!(s.unitarity_residual() < 1e-12);
            assert!(s.asymmetry() > 0.0);
            let d = (s.entries[(0, 1)].arg() - s.entries[(1, 0)].arg()).rem_euclid(2.0 * PI);
            assert!((d - 4.0 * PI / 3.0).abs() < 1e-10, "{d}");
        }
    }

    #[test]
    fn closed_form_matches_modes() {
        let p = EffectiveParams::new(WR, G, 1).unwrap();
        for w in omega_grid(-1.0, 5.0, 97) {
            let a = smatrix(w, WR, G, GAMMA).unwrap();
            let b = smatrix_from_modes(w, &p, GAMMA).unwrap();
            assert!((a.entries - b.entries).camax() < 1e-13);
            let c = smatrix_oriented(w, &p.flipped(), GAMMA).unwrap();
            let d = smatrix_from_modes(w, &p.flipped(), GAMMA).unwrap();
            assert!((c.entries - d.entries).camax() < 1e-13);
        }
    }

    #[test]
    fn differential_row() {
        for w in omega_grid(0.0, 4.5, 50) {
            let s = smatrix(w, WR, G, GAMMA).unwrap();
            let st = differential_basis(&s);
            let (a, b) = alpha_beta(w, WR, G, GAMMA);
            assert!((st[(2, 0)] + b * FRAC_1_SQRT_2).norm() < 1e-14);
            assert!((st[(2, 1)] - C64::new(0.0, 1.5f64.sqrt()) * b).norm() < 1e-14);
            assert!((st[(2, 2)] - a).norm() < 1e-14);
            assert!((st[(2, 1)].norm_sqr() - 3.0 * st[(2, 0)].norm_sqr()).abs() < 1e-13);
            assert!((st[(2, 1)].norm_sqr() - s3_minus_closed_form(w, WR, G, GAMMA)).abs() < 1e-12);
            for c in 0..3 {
                let n: f64 = (0..3).map(|r| st[(r, c)].norm_sqr()).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weak_coupling_is_identity() {
        let s = smatrix(1.3, WR, G, 1e-12).unwrap();
        assert!((s.entries - Matrix3::identity()).camax() < 1e-10);
    }

    #[test]
    fn powers_sum_to_one() {
        for input in [InputMode::Plus, InputMode::Minus] {
            for row in
                output_powers(WR, G, GAMMA, input, &default_omega_grid(WR, G, GAMMA)).unwrap()
            {
                assert!((row[1] + row[2] + row[3] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn peak_values() {
        let d = directionality(WR, G, GAMMA).unwrap();
        assert!((d.resonance_formula - 6.0 / 9.1225).abs() < 1e-15);
        assert!((d.resonance_power - d.resonance_formula).abs() < 1e-12);
        assert!(d.max_power >= d.resonance_power);
        assert!((d.max_power - 2.0 / 3.0).abs() < 1e-9);
        let tiny = resonance_peak(1.0, 1e-6);
        assert!((tiny - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn peak_decreases_with_gamma_and_scales() {
        let vals: Vec<f64> = [0.1, 0.2, 0.4, 0.8]
            .iter()
            .map(|&gm| resonance_peak(G, gm))
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        let a = s3_minus_closed_form(WR + 0.7, WR, G, GAMMA);
        let b = s3_minus_closed_form(WR + 1.4, WR, 2.0 * G, 2.0 * GAMMA);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn cyclic_relabeling_commutes() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let p = Matrix3::new(z, z, o, o, z, z, z, o, z);
        let s = smatrix(2.2, WR, G, GAMMA).unwrap().entries;
        assert!((p * s * p.transpose() - s).camax() < 1e-14);
    }
}
