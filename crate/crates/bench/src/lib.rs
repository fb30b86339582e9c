// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use chiralring::lattice::PhaseGrid;
use chiralring::ring::RingParams;

/// Loading-flux ring at E_J/E_C = `ratio` with E_J = 10.
pub fn ring(ratio: f64) -> RingParams {
    RingParams::new(10.0, 10.0 / ratio, 100.0, 1, 2.0 * PI).expect("valid fixture")
}

pub fn grid(l: usize) -> PhaseGrid {
    PhaseGrid::new(l).expect("multiple of 6")
}
