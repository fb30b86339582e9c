// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module of the crate.

use crate::lattice::Basis;

/// Errors raised by grid construction, operators, solvers and analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid size L = {0}: must be a positive multiple of 6")]
    InvalidGrid(usize),

    #[error("basis mismatch: expected {expected:?}, got {found:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point (phi2, phi3) = ({phi2}, {phi3}) does not lie on the L = {l} grid")]
    OffGrid { phi2: f64, phi3: f64, l: usize },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NonConvergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("propagation failed at t = {t}: {reason}")]
    Propagation { t: f64, reason: String },

    #[error("coupling denominator vanishes at omega_r / E_N = {ratio} (pole at 2N +/- 1)")]
    ResonancePole { ratio: f64 },

    #[error("density matrix lost positivity at t = {t}: min eigenvalue {min_eigenvalue:.3e}")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("state loading failed: {0}")]
    Loading(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("serialization: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
