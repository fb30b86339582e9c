// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::RingParams;
use crate::error::Result;
use crate::lattice::{diag_operator, Basis, DiagonalMap, GridFft, LinearMap, PhaseGrid};

/// Grid dimension below which the apply stays sequential.
const PAR_MIN_DIM: usize = 1 << 14;

/// Ring Hamiltonian applied in the charge basis.
///
/// The kinetic part is a diagonal over (n₊, n₋); every cosine becomes a pair
/// of cyclic charge shifts carrying the flux phase.
#[derive(Clone, Debug)]
pub struct RingHamiltonian {
    grid: PhaseGrid,
    params: RingParams,
    diag: Vec<f64>,
    /// (Δn₊, Δn₋, coefficient): y[n] += c·x[n − Δn].
    terms: [(i64, i64, C64); 6],
}

/// Charge-basis kinetic energy at (n₊, n₋), without the constant.
fn kinetic(p: &RingParams, n_plus: i64, n_minus: i64) -> f64 {
    let np = n_plus as f64 - 2.0 * p.n as f64 / 3.0;
    let nm = n_minus as f64;
    0.5 * p.e_c * (3.0 * np * np + nm * nm)
}

/// Josephson potential, with per-junction energies when disorder is set.
pub fn ring_potential(p: &RingParams, phi_plus: f64, phi_minus: f64) -> f64 {
    let a = p.phi_e / 3.0;
    let [e1, e2, e3] = p.junction_energies();
    -(e1 * (phi_plus + phi_minus - a).cos()
        + e3 * (phi_plus - phi_minus + a).cos()
        + e2 * (2.0 * phi_minus + a).cos())
}

/// I_ch(φ₊, φ₋) = 2 cos φ₊ sin(φ₋ − φ_e/3) − sin(2φ₋ + φ_e/3), units of I₀.
pub fn chiral_current(phi_e: f64, phi_plus: f64, phi_minus: f64) -> f64 {
    let a = phi_e / 3.0;
    2.0 * phi_plus.cos() * (phi_minus - a).sin() - (2.0 * phi_minus + a).sin()
}

pub fn build_hamiltonian(params: &RingParams, grid: PhaseGrid) -> Result<RingHamiltonian> {
    params.validate()?;
    let constant = params.constant_term();
    let diag = (0..grid.dim())
        .map(|i| {
            let (a, b) = grid.labels_at(i);
            kinetic(params, a, b) + constant
        })
        .collect();
    let a = params.phi_e / 3.0;
    let [e1, e2, e3] = params.junction_energies();
    let c = |e: f64, phase: f64| C64::from_polar(-0.5 * e, phase);
    let terms = [
        (1, 1, c(e1, -a)),
        (-1, -1, c(e1, a)),
        (1, -1, c(e3, a)),
        (-1, 1, c(e3, -a)),
        (0, 2, c(e2, a)),
        (0, -2, c(e2, -a)),
    ];
    Ok(RingHamiltonian {
        grid,
        params: params.clone(),
        diag,
        terms,
    })
}

impl RingHamiltonian {
    pub fn params(&self) -> &RingParams {
        &self.params
    }

    /// Shift terms as (Δn₊, Δn₋, coefficient).
    pub fn shift_terms(&self) -> &[(i64, i64, C64)] {
        &self.terms
    }

    /// Diagonal in the charge basis, constant included.
    pub fn charge_diagonal(&self) -> &[f64] {
        &self.diag
    }

    fn apply_row(&self, row: usize, x: &[C64], y: &mut [C64]) {
        let l = self.grid.len();
        let base = row * l;
        for (c, yc) in y.iter_mut().enumerate() {
            *yc = x[base + c] * self.diag[base + c];
        }
        for &(sp, sm, coef) in &self.terms {
            let src = (row as i64 - sp).rem_euclid(l as i64) as usize;
            let xs = &x[src * l..(src + 1) * l];
            let s = sm.rem_euclid(l as i64) as usize;
            // y[c] += coef · xs[c − s (mod L)]
            for (yc, xv) in y[..s].iter_mut().zip(&xs[l - s..]) {
                *yc += coef * xv;
            }
            for (yc, xv) in y[s..].iter_mut().zip(&xs[..l - s]) {
                *yc += coef * xv;
            }
        }
    }
}

impl LinearMap for RingHamiltonian {
    fn grid(&self) -> PhaseGrid {
        self.grid
    }
    fn basis(&self) -> Basis {
        Basis::Charge
    }
    fn is_hermitian(&self) -> bool {
        true
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let l = self.grid.len();
        assert_eq!(x.len(), self.grid.dim());
        if self.grid.dim() >= PAR_MIN_DIM {
            y.par_chunks_mut(l)
                .enumerate()
                .for_each(|(row, yr)| self.apply_row(row, x, yr));
        } else {
            y.chunks_mut(l)
                .enumerate()
                .for_each(|(row, yr)| self.apply_row(row, x, yr));
        }
    }
}

/// Kinetic term diagonal in charge, potential diagonal in phase; applied
/// in the phase basis through two FFTs.
#[derive(Clone, Debug)]
pub struct SplitHamiltonian {
    fft: GridFft,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
}

impl SplitHamiltonian {
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }
}

fn split(params: &RingParams, grid: PhaseGrid, v: impl Fn(f64, f64) -> f64) -> SplitHamiltonian {
    let constant = params.constant_term();
    let kinetic = (0..grid.dim())
        .map(|i| {
            let (a, b) = grid.labels_at(i);
            kinetic(params, a, b) + constant
        })
        .collect();
    let potential = (0..grid.dim())
        .map(|i| {
            let (a, b) = grid.labels_at(i);
            v(grid.phi(a), grid.phi(b))
        })
        .collect();
    SplitHamiltonian {
        fft: GridFft::new(grid),
        kinetic,
        potential,
    }
}

/// Same operator as [`build_hamiltonian`], routed through the phase basis.
pub fn build_split_hamiltonian(params: &RingParams, grid: PhaseGrid) -> Result<SplitHamiltonian> {
    params.validate()?;
    Ok(split(params, grid, |a, b| ring_potential(params, a, b)))
}

/// Quadratic expansion E_J[φ₊² + 3(φ₋ − φ_e/3)²] with the full kinetic term.
///
/// φ₋ − φ_e/3 is wrapped into (−π, π]. Disorder is ignored.
pub fn build_harmonic_hamiltonian(
    params: &RingParams,
    grid: PhaseGrid,
) -> Result<SplitHamiltonian> {
    params.validate()?;
    let a = params.phi_e / 3.0;
    let e_j = params.e_j;
    Ok(split(params, grid, move |pp, pm| {
        let d = wrap_angle(pm - a);
        e_j * (pp * pp + 3.0 * d * d)
    }))
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

impl LinearMap for SplitHamiltonian {
    fn grid(&self) -> PhaseGrid {
        self.fft.grid()
    }
    fn basis(&self) -> Basis {
        Basis::Phase
    }
    fn is_hermitian(&self) -> bool {
        true
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(x);
        self.fft.to_charge(y);
        for (v, k) in y.iter_mut().zip(&self.kinetic) {
            *v *= k;
        }
        self.fft.to_phase(y);
        for ((v, xi), u) in y.iter_mut().zip(x).zip(&self.potential) {
            *v += xi * u;
        }
    }
}

/// Phase-basis diagonal chiral-current operator.
pub fn chiral_current_map(grid: PhaseGrid, phi_e: f64) -> DiagonalMap {
    diag_operator(grid, move |a, b| chiral_current(phi_e, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_to, hermiticity_defect, WaveFunction};

    fn params(phi_e: f64) -> RingParams {
        RingParams::new(10.0, 1.0, 100.0, 1, phi_e).unwrap()
    }

    #[test]
    fn charge_and_phase_routes_agree() {
        let grid = PhaseGrid::new(12).unwrap();
        for phi_e in [0.0, 1.1, 2.0 * PI] {
            let p = params(phi_e).with_disorder(Some([0.3, -0.2, 0.1]));
            let h = build_hamiltonian(&p, grid).unwrap();
            let s = build_split_hamiltonian(&p, grid).unwrap();
            let psi = WaveFunction::random(grid, Basis::Phase, 2);
            let a = apply_to(&h, &psi).unwrap().to_basis(Basis::Phase).unwrap();
            let b = apply_to(&s, &psi).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-11, "phi_e = {phi_e}");
            }
        }
    }

    #[test]
    fn hermitian() {
        let grid = PhaseGrid::new(18).unwrap();
        let h = build_hamiltonian(&params(0.7), grid).unwrap();
        assert!(hermiticity_defect(&h, 4, 9) < 1e-13);
        let hh = build_harmonic_hamiltonian(&params(2.0 * PI), grid).unwrap();
        assert!(hermiticity_defect(&hh, 4, 9) < 1e-13);
    }

    #[test]
    fn current_values() {
        let v = chiral_current(0.0, 0.0, 2.0 * PI / 3.0);
        assert!((v - 1.5 * 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(chiral_current(0.0, 0.0, 0.0), 0.0);
        for (a, b) in [(0.3, 0.9), (-1.2, 2.5), (3.0, -0.1)] {
            assert!((chiral_current(0.0, a, -b) + chiral_current(0.0, a, b)).abs() < 1e-14);
        }
    }

    #[test]
    fn potential_minimum() {
        let grid = PhaseGrid::new(24).unwrap();
        let p = params(0.0);
        let v = diag_operator(grid, |a, b| ring_potential(&p, a, b));
        let (idx, min) = v.values().iter().enumerate().map(|(i, c)| (i, c.re)).fold(
            (0, f64::INFINITY),
            |acc, x| if x.1 < acc.1 { x } else { acc },
        );
        assert!((min + 3.0 * p.e_j).abs() < 1e-12);
        let (a, b) = grid.labels_at(idx);
        assert!((a, b) == (0, 0) || (a, b) == (12, 12));
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(2.0 * PI / 3.0 - 2.0 * PI) - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((wrap_angle(PI) - PI).abs() < 1e-14);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-14);
    }
}
