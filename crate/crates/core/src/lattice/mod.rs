// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Discretized (φ₊, φ₋) torus, its charge dual and matrix-free operators.
//!
//! Both axes carry integer labels in `[-L/2+1, L/2]`. A phase label `k`
//! denotes the angle `2πk/L`; the same labels index charges `n`. Amplitudes
//! are stored row-major with `k₊` as the outer index.

mod fourier;
mod io;
mod ops;
mod wavefunction;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fourier::{fourier_to_charge, fourier_to_phase, GridFft};
pub use io::{read_binary, read_csv, write_binary, write_csv};
pub use ops::{
    apply_to, diag_operator, diag_operator_complex, hermiticity_defect, shift_operator,
    DiagonalMap, LinearMap, ShiftMap,
};
pub use wavefunction::WaveFunction;
pub(crate) use wavefunction::{dot, norm};

/// Representation an amplitude vector is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Phase,
    Charge,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Phase => "phase",
            Basis::Charge => "charge",
        }
    }
}

/// One of the two torus directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Plus,
    Minus,
}

/// L×L periodic grid. `L` is a positive multiple of 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseGrid {
    l: usize,
}

impl PhaseGrid {
    pub fn new(l: usize) -> Result<Self> {
        if l == 0 || l % 6 != 0 {
            return Err(Error::InvalidGrid(l));
        }
        Ok(Self { l })
    }

    /// Points per axis.
    #[inline]
    pub fn len(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of grid points, L².
    #[inline]
    pub fn dim(&self) -> usize {
        self.l * self.l
    }

    #[inline]
    pub fn min_label(&self) -> i64 {
        -(self.l as i64) / 2 + 1
    }

    #[inline]
    pub fn max_label(&self) -> i64 {
        self.l as i64 / 2
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> + Clone {
        self.min_label()..=self.max_label()
    }

    /// Maps any integer onto its representative in `[-L/2+1, L/2]`.
    #[inline]
    pub fn wrap(&self, k: i64) -> i64 {
        let l = self.l as i64;
        let r = (k - self.min_label()).rem_euclid(l);
        r + self.min_label()
    }

    /// Array position of label `k` (wrapped).
    #[inline]
    pub fn position(&self, k: i64) -> usize {
        (k - self.min_label()).rem_euclid(self.l as i64) as usize
    }

    /// Label stored at array position `i`.
    #[inline]
    pub fn label(&self, i: usize) -> i64 {
        i as i64 + self.min_label()
    }

    /// Angle of label `k`, 2πk/L, in (−π, π] for in-range labels.
    #[inline]
    pub fn phi(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.l as f64
    }

    /// Flat row-major index of the label pair.
    #[inline]
    pub fn flat(&self, k_plus: i64, k_minus: i64) -> usize {
        self.position(k_plus) * self.l + self.position(k_minus)
    }

    /// Label pair at a flat index.
    #[inline]
    pub fn labels_at(&self, flat: usize) -> (i64, i64) {
        (self.label(flat / self.l), self.label(flat % self.l))
    }

    /// Label of an angle if it sits on the grid (within `1e-9` of a multiple of 2π/L).
    pub fn label_of_phi(&self, phi: f64) -> Option<i64> {
        let x = phi * self.l as f64 / (2.0 * PI);
        let k = x.round();
        ((x - k).abs() < 1e-9).then(|| self.wrap(k as i64))
    }
}
