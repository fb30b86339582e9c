// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fourier_to_charge, fourier_to_phase, Basis, PhaseGrid};
use crate::error::{Error, Result};

/// Basis-tagged amplitude vector over the L² grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: PhaseGrid,
    basis: Basis,
    amps: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: PhaseGrid, basis: Basis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { grid, basis, amps })
    }

    pub fn zeros(grid: PhaseGrid, basis: Basis) -> Self {
        Self {
            grid,
            basis,
            amps: vec![C64::new(0.0, 0.0); grid.dim()],
        }
    }

    /// Builds amplitudes from a function of the label pair `(k₊, k₋)`.
    pub fn from_fn(grid: PhaseGrid, basis: Basis, f: impl Fn(i64, i64) -> C64) -> Self {
        let amps = (0..grid.dim())
            .map(|i| {
                let (a, b) = grid.labels_at(i);
                f(a, b)
            })
            .collect();
        Self { grid, basis, amps }
    }

    /// Unit amplitude on one grid point.
    pub fn delta(grid: PhaseGrid, basis: Basis, k_plus: i64, k_minus: i64) -> Self {
        let mut psi = Self::zeros(grid, basis);
        psi.amps[grid.flat(k_plus, k_minus)] = C64::new(1.0, 0.0);
        psi
    }

    /// Normalized vector with entries uniform in the unit square, seeded.
    pub fn random(grid: PhaseGrid, basis: Basis, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..grid.dim())
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut psi = Self { grid, basis, amps };
        psi.normalize();
        psi
    }

    #[inline]
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    #[inline]
    pub fn basis(&self) -> Basis {
        self.basis
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn amplitude(&self, k_plus: i64, k_minus: i64) -> C64 {
        self.amps[self.grid.flat(k_plus, k_minus)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit norm; a zero vector is left untouched.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let s = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
        n
    }

    /// ⟨self|other⟩, with `other` converted to `self`'s basis when needed.
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                found: other.grid.dim(),
            });
        }
        if self.basis == other.basis {
            return Ok(dot(&self.amps, &other.amps));
        }
        let converted = other.to_basis(self.basis)?;
        Ok(dot(&self.amps, &converted.amps))
    }

    /// |⟨self|other⟩|² for normalized inputs.
    pub fn overlap(&self, other: &WaveFunction) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_basis(&self, basis: Basis) -> Result<WaveFunction> {
        match (self.basis, basis) {
            (a, b) if a == b => Ok(self.clone()),
            (Basis::Phase, Basis::Charge) => fourier_to_charge(self),
            _ => fourier_to_phase(self),
        }
    }

    /// Probability density per grid point.
    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Conjugate-linear in the first argument. Sequential for reproducibility.
#[inline]
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

#[inline]
pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
