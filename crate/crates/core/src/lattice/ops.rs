// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::wavefunction::{dot, norm};
use super::{Axis, Basis, PhaseGrid, WaveFunction};
use crate::error::Result;

/// Matrix-free linear operator on grid amplitudes.
///
/// Implementors are immutable after construction. `apply_into` must be
/// deterministic and must overwrite every entry of `y`.
pub trait LinearMap: Send + Sync {
    fn grid(&self) -> PhaseGrid;

    /// Representation the raw `apply_into` acts in.
    fn basis(&self) -> Basis;

    fn is_hermitian(&self) -> bool;

    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    fn dim(&self) -> usize {
        self.grid().dim()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// ⟨ψ|A|ψ⟩ with ψ already in the operator's basis.
    fn expectation_raw(&self, x: &[C64]) -> C64 {
        dot(x, &self.apply(x))
    }
}

impl<T: LinearMap + ?Sized> LinearMap for &T {
    fn grid(&self) -> PhaseGrid {
        (**self).grid()
    }
    fn basis(&self) -> Basis {
        (**self).basis()
    }
    fn is_hermitian(&self) -> bool {
        (**self).is_hermitian()
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply_into(x, y)
    }
}

impl<T: LinearMap + ?Sized> LinearMap for Box<T> {
    fn grid(&self) -> PhaseGrid {
        (**self).grid()
    }
    fn basis(&self) -> Basis {
        (**self).basis()
    }
    fn is_hermitian(&self) -> bool {
        (**self).is_hermitian()
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply_into(x, y)
    }
}

/// Applies `map` to `psi`, converting `psi` into the operator basis first.
pub fn apply_to(map: &dyn LinearMap, psi: &WaveFunction) -> Result<WaveFunction> {
    let x = psi.to_basis(map.basis())?;
    WaveFunction::new(map.grid(), map.basis(), map.apply(x.amplitudes()))
}

/// Relative Hermiticity defect max |⟨u,Av⟩ − ⟨Au,v⟩| / (‖A u‖‖v‖ + ‖u‖‖A v‖)
/// over `trials` seeded random pairs.
pub fn hermiticity_defect(map: &dyn LinearMap, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = map.dim();
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let mut draw = || -> Vec<C64> {
            (0..n)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        };
        let u = draw();
        let v = draw();
        let au = map.apply(&u);
        let av = map.apply(&v);
        let lhs = dot(&u, &av);
        let rhs = dot(&au, &v);
        let scale = norm(&au) * norm(&v) + norm(&u) * norm(&av);
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    worst
}

/// Pointwise multiplication in the phase basis.
#[derive(Clone, Debug)]
pub struct DiagonalMap {
    grid: PhaseGrid,
    values: Vec<C64>,
    hermitian: bool,
}

impl DiagonalMap {
    pub fn from_values(grid: PhaseGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.dim() {
            return Err(crate::Error::DimensionMismatch {
                expected: grid.dim(),
                found: values.len(),
            });
        }
        let hermitian = values.iter().all(|v| v.im == 0.0);
        Ok(Self {
            grid,
            values,
            hermitian,
        })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Pointwise product of two diagonal maps on the same grid.
    pub fn compose(&self, other: &DiagonalMap) -> DiagonalMap {
        assert_eq!(self.grid, other.grid);
        let values: Vec<C64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        let hermitian = values.iter().all(|v| v.im == 0.0);
        DiagonalMap {
            grid: self.grid,
            values,
            hermitian,
        }
    }

    pub fn adjoint(&self) -> DiagonalMap {
        DiagonalMap {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            hermitian: self.hermitian,
        }
    }
}

impl LinearMap for DiagonalMap {
    fn grid(&self) -> PhaseGrid {
        self.grid
    }
    fn basis(&self) -> Basis {
        Basis::Phase
    }
    fn is_hermitian(&self) -> bool {
        self.hermitian
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for ((yi, xi), v) in y.iter_mut().zip(x).zip(&self.values) {
            *yi = v * xi;
        }
    }
}

/// Real-valued phase-basis multiplication operator (always Hermitian).
pub fn diag_operator(grid: PhaseGrid, f: impl Fn(f64, f64) -> f64) -> DiagonalMap {
    let values = (0..grid.dim())
        .map(|i| {
            let (a, b) = grid.labels_at(i);
            C64::new(f(grid.phi(a), grid.phi(b)), 0.0)
        })
        .collect();
    DiagonalMap {
        grid,
        values,
        hermitian: true,
    }
}

/// Complex-valued multiplication operator; Hermitian iff every value is real.
pub fn diag_operator_complex(grid: PhaseGrid, f: impl Fn(f64, f64) -> C64) -> DiagonalMap {
    let values: Vec<C64> = (0..grid.dim())
        .map(|i| {
            let (a, b) = grid.labels_at(i);
            f(grid.phi(a), grid.phi(b))
        })
        .collect();
    let hermitian = values.iter().all(|v| v.im == 0.0);
    DiagonalMap {
        grid,
        values,
        hermitian,
    }
}

/// Cyclic phase-grid translation: (Sψ)(k) = ψ(k + steps) along `axis`.
///
/// In the charge basis this is multiplication by e^{i2π·steps·n/L}.
#[derive(Clone, Copy, Debug)]
pub struct ShiftMap {
    grid: PhaseGrid,
    axis: Axis,
    steps: i64,
}

impl ShiftMap {
    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn steps(&self) -> i64 {
        self.steps
    }

    /// Charge-basis phase factor for label `n`.
    pub fn charge_phase(&self, n: i64) -> C64 {
        let l = self.grid.len() as f64;
        C64::from_polar(1.0, 2.0 * PI * (self.steps * n) as f64 / l)
    }

    pub fn inverse(&self) -> ShiftMap {
        ShiftMap {
            steps: -self.steps,
            ..*self
        }
    }
}

pub fn shift_operator(grid: PhaseGrid, axis: Axis, steps: i64) -> ShiftMap {
    ShiftMap { grid, axis, steps }
}

impl LinearMap for ShiftMap {
    fn grid(&self) -> PhaseGrid {
        self.grid
    }
    fn basis(&self) -> Basis {
        Basis::Phase
    }
    fn is_hermitian(&self) -> bool {
        let l = self.grid.len() as i64;
        // S = S† only for shifts of 0 or L/2.
        (2 * self.steps).rem_euclid(l) == 0
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let l = self.grid.len();
        let s = self.steps.rem_euclid(l as i64) as usize;
        match self.axis {
            Axis::Plus => {
                for row in 0..l {
                    let src = (row + s) % l;
                    y[row * l..(row + 1) * l].copy_from_slice(&x[src * l..(src + 1) * l]);
                }
            }
            Axis::Minus => {
                for row in 0..l {
                    let xr = &x[row * l..(row + 1) * l];
                    let yr = &mut y[row * l..(row + 1) * l];
                    yr[..l - s].copy_from_slice(&xr[s..]);
                    yr[l - s..].copy_from_slice(&xr[..s]);
                }
            }
        }
    }
}
