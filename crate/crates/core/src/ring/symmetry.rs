// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Special states, the cyclic node permutation and chirality.
//!
//! The exact permutation of node phases does not preserve the (φ₊, φ₋)
//! sublattice structure, so P₁₂₃ is realized through its eigenvalues:
//! a grid point with winding number w picks up e^{−i2πNw/3}. The winding
//! counts how often the three wrapped junction phase drops go around the
//! ring. Points where a drop sits exactly at π are assigned w = 0.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{
    shift_operator, Axis, Basis, DiagonalMap, LinearMap, PhaseGrid, ShiftMap, WaveFunction,
};

/// The three grid states that become ground states along the flux sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialState {
    /// |N, 0, 0⟩.
    Uniform,
    /// |N, 2π/3, −2π/3⟩.
    ChiralPlus,
    /// |N, −2π/3, 2π/3⟩.
    ChiralMinus,
}

impl SpecialState {
    pub const ALL: [SpecialState; 3] = [
        SpecialState::Uniform,
        SpecialState::ChiralPlus,
        SpecialState::ChiralMinus,
    ];

    /// (φ₂, φ₃).
    pub fn phases(self) -> (f64, f64) {
        let t = 2.0 * PI / 3.0;
        match self {
            SpecialState::Uniform => (0.0, 0.0),
            SpecialState::ChiralPlus => (t, -t),
            SpecialState::ChiralMinus => (-t, t),
        }
    }

    pub fn winding(self) -> i64 {
        match self {
            SpecialState::Uniform => 0,
            SpecialState::ChiralPlus => 1,
            SpecialState::ChiralMinus => -1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpecialState::Uniform => "uniform",
            SpecialState::ChiralPlus => "chiral-plus",
            SpecialState::ChiralMinus => "chiral-minus",
        }
    }
}

/// Winding number of the junction phase drops at grid point (k₊, k₋).
pub fn vorticity(grid: PhaseGrid, k_plus: i64, k_minus: i64) -> i64 {
    let l = grid.len() as i64;
    let half = l / 2;
    let drops = [k_plus + k_minus, -2 * k_minus, -(k_plus - k_minus)].map(|d| grid.wrap(d));
    if drops.contains(&half) {
        return 0;
    }
    drops.iter().sum::<i64>() / l
}

fn p123_phase(n: i64, w: i64) -> C64 {
    // Reduce N·w mod 3 so the phase is exact for large N.
    match (n * w).rem_euclid(3) {
        0 => C64::new(1.0, 0.0),
        r => C64::from_polar(1.0, -2.0 * PI * r as f64 / 3.0),
    }
}

/// Cyclic permutation P₁₂₃ on the grid for total charge N.
pub fn permutation_p123(grid: PhaseGrid, n: i64) -> DiagonalMap {
    winding_map(grid, |w| p123_phase(n, w))
}

/// P₁₃₂ = P₁₂₃†.
pub fn permutation_p132(grid: PhaseGrid, n: i64) -> DiagonalMap {
    winding_map(grid, |w| p123_phase(n, w).conj())
}

/// χ = (P₁₂₃ − P₁₃₂)/2i, real diagonal −sin(2πNw/3).
pub fn chirality_chi(grid: PhaseGrid, n: i64) -> DiagonalMap {
    winding_map(grid, |w| {
        let p = p123_phase(n, w);
        C64::new(((p - p.conj()) / C64::new(0.0, 2.0)).re, 0.0)
    })
}

fn winding_map(grid: PhaseGrid, f: impl Fn(i64) -> C64) -> DiagonalMap {
    let values = (0..grid.dim())
        .map(|i| {
            let (a, b) = grid.labels_at(i);
            f(vorticity(grid, a, b))
        })
        .collect();
    DiagonalMap::from_values(grid, values).expect("length matches grid")
}

/// Displacement taking |N,0,0⟩ to |N,−2π/3,2π/3⟩: a shift by L/3 along φ₋.
pub fn spectral_flow_displacement(grid: PhaseGrid) -> ShiftMap {
    shift_operator(grid, Axis::Minus, grid.len() as i64 / 3)
}

/// Reflection φ₋ → −φ₋ in the phase basis.
#[derive(Clone, Copy, Debug)]
pub struct ParityMap {
    grid: PhaseGrid,
}

impl ParityMap {
    pub fn new(grid: PhaseGrid) -> Self {
        Self { grid }
    }
}

impl LinearMap for ParityMap {
    fn grid(&self) -> PhaseGrid {
        self.grid
    }
    fn basis(&self) -> Basis {
        Basis::Phase
    }
    fn is_hermitian(&self) -> bool {
        true
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let l = self.grid.len();
        for row in 0..l {
            for col in 0..l {
                let km = self.grid.label(col);
                y[row * l + col] = x[row * l + self.grid.position(-km)];
            }
        }
    }
}

/// Grid representative of |N, φ₂, φ₃⟩ in the phase basis.
///
/// A point of the physical torus appears twice on the (φ₊, φ₋) grid; the
/// state is the symmetric combination of both copies.
pub fn plane_wave_state(grid: PhaseGrid, phi2: f64, phi3: f64) -> Result<WaveFunction> {
    let off = || Error::OffGrid {
        phi2,
        phi3,
        l: grid.len(),
    };
    let kp = grid.label_of_phi(0.5 * (phi2 + phi3)).ok_or_else(off)?;
    let km = grid.label_of_phi(0.5 * (phi2 - phi3)).ok_or_else(off)?;
    let half = grid.len() as i64 / 2;
    let mut psi = WaveFunction::zeros(grid, Basis::Phase);
    let amps = psi.amplitudes_mut();
    amps[grid.flat(kp, km)] += FRAC_1_SQRT_2;
    amps[grid.flat(kp + half, km + half)] += FRAC_1_SQRT_2;
    Ok(psi)
}

pub fn special_state(grid: PhaseGrid, which: SpecialState) -> WaveFunction {
    let (a, b) = which.phases();
    plane_wave_state(grid, a, b).expect("L divisible by 6 holds the special points")
}

/// Projects amplitudes onto the physical sector (even under the (π, π)
/// translation), in either basis.
pub fn project_physical(grid: PhaseGrid, basis: Basis, amps: &mut [C64]) {
    match basis {
        Basis::Charge => {
            for (i, a) in amps.iter_mut().enumerate() {
                let (np, nm) = grid.labels_at(i);
                if (np + nm).rem_euclid(2) == 1 {
                    *a = C64::new(0.0, 0.0);
                }
            }
        }
        Basis::Phase => {
            let l = grid.len();
            let half = l / 2;
            for row in 0..half {
                for col in 0..l {
                    let i = row * l + col;
                    let j = (row + half) * l + (col + half) % l;
                    let m = 0.5 * (amps[i] + amps[j]);
                    amps[i] = m;
                    amps[j] = m;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_to, hermiticity_defect};

    #[test]
    fn windings_of_special_points() {
        let g = PhaseGrid::new(12).unwrap();
        assert_eq!(vorticity(g, 0, 0), 0);
        assert_eq!(vorticity(g, 0, 4), 1);
        assert_eq!(vorticity(g, 6, -2), 1);
        assert_eq!(vorticity(g, 0, -4), -1);
        assert_eq!(vorticity(g, 6, 6), 0);
    }

    #[test]
    fn p123_unitary_and_cubes_to_one() {
        let g = PhaseGrid::new(18).unwrap();
        for n in [0, 1, 2, 5, -4] {
            let p = permutation_p123(g, n);
            let p3 = p.compose(&p).compose(&p);
            for v in p.values() {
                assert!((v.norm() - 1.0).abs() < 1e-14);
            }
            for v in p3.values() {
                assert!((v - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn chi_eigenvalues() {
        let g = PhaseGrid::new(12).unwrap();
        let n = 1;
        let chi = chirality_chi(g, n);
        assert!(hermiticity_defect(&chi, 2, 1) < 1e-14);
        let s = (2.0 * PI / 3.0).sin();
        for (state, want) in [
            (SpecialState::Uniform, 0.0),
            (SpecialState::ChiralPlus, -s),
            (SpecialState::ChiralMinus, s),
        ] {
            let psi = special_state(g, state);
            let out = apply_to(&chi, &psi).unwrap();
            for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
                assert!((a - b * want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn parity_anticommutes_with_chi() {
        let g = PhaseGrid::new(12).unwrap();
        let chi = chirality_chi(g, 1);
        let par = ParityMap::new(g);
        let psi = WaveFunction::random(g, Basis::Phase, 3);
        let lhs = par.apply(&chi.apply(&par.apply(psi.amplitudes())));
        let rhs = chi.apply(psi.amplitudes());
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a + b).norm() < 1e-14);
        }
    }

    #[test]
    fn displacement_moves_uniform_to_chiral_minus() {
        let g = PhaseGrid::new(12).unwrap();
        let d = spectral_flow_displacement(g);
        let out = apply_to(&d, &special_state(g, SpecialState::Uniform)).unwrap();
        let target = special_state(g, SpecialState::ChiralMinus);
        assert!((out.overlap(&target).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_in_both_bases() {
        let g = PhaseGrid::new(12).unwrap();
        let psi = WaveFunction::random(g, Basis::Phase, 8);
        let mut a = psi.amplitudes().to_vec();
        project_physical(g, Basis::Phase, &mut a);
        let mut c = psi.to_basis(Basis::Charge).unwrap().into_amplitudes();
        project_physical(g, Basis::Charge, &mut c);
        let back = WaveFunction::new(g, Basis::Charge, c)
            .unwrap()
            .to_basis(Basis::Phase)
            .unwrap();
        for (x, y) in a.iter().zip(back.amplitudes()) {
            assert!((x - y).norm() < 1e-13);
        }
        let pw = special_state(g, SpecialState::ChiralPlus);
        let mut q = pw.amplitudes().to_vec();
        project_physical(g, Basis::Phase, &mut q);
        assert_eq!(q, pw.amplitudes());
    }

    #[test]
    fn off_grid_point_rejected() {
        let g = PhaseGrid::new(12).unwrap();
        assert!(matches!(
            plane_wave_state(g, 0.1, 0.0),
            Err(Error::OffGrid { .. })
        ));
    }
}
