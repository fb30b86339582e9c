// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Desk-scale simulation of a three-junction superconducting ring.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effective;
pub mod error;
pub mod lattice;
pub mod opensys;
pub mod quench;
pub mod ring;
pub mod scattering;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
