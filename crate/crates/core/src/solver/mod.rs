// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Low-spectrum eigensolver, time propagators and the dense oracle.

mod bessel;
mod dense;
mod lanczos;
mod propagate;

pub use bessel::bessel_j_sequence;
pub use dense::{dense_eigh, dense_lowest, to_dense, DenseMap, DENSE_MAX_DIM};
pub use lanczos::{
    lowest_eigenpairs, lowest_eigenpairs_constrained, norm_estimate, EigenConfig, EigenResult,
    Projector, NORM_POWER_ITERATIONS,
};
pub use propagate::{
    emission_times, propagate, propagate_observed, step_doubling_infidelity, PropagationStats,
    PropagatorConfig, PropagatorMethod, NORM_TOLERANCE,
};
