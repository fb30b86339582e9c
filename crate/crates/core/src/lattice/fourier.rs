// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Unitary 2D transform between phase and charge representations.
//!
//! ψ_c(n) = L^{-1/2} Σ_k e^{-i2πkn/L} ψ_p(k) on each axis.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::{Basis, PhaseGrid, WaveFunction};
use crate::error::{Error, Result};

/// Cached forward/inverse plans for one grid size.
#[derive(Clone)]
pub struct GridFft {
    grid: PhaseGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for GridFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFft").field("grid", &self.grid).finish()
    }
}

impl GridFft {
    pub fn new(grid: PhaseGrid) -> Self {
        let mut planner = FftPlanner::new();
        let l = grid.len();
        Self {
            grid,
            forward: planner.plan_fft_forward(l),
            inverse: planner.plan_fft_inverse(l),
            scale: 1.0 / (l as f64).sqrt(),
        }
    }

    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    /// Phase amplitudes to charge amplitudes, in place.
    pub fn to_charge(&self, data: &mut [C64]) {
        self.transform(data, &*self.forward);
    }

    /// Charge amplitudes to phase amplitudes, in place.
    pub fn to_phase(&self, data: &mut [C64]) {
        self.transform(data, &*self.inverse);
    }

    fn transform(&self, data: &mut [C64], plan: &dyn Fft<f64>) {
        let l = self.grid.len();
        assert_eq!(data.len(), l * l, "amplitude length does not match grid");
        // Array position i holds label i + kmin; natural FFT order wants k mod L.
        let rot = (self.grid.min_label().rem_euclid(l as i64)) as usize;
        let mut line = vec![C64::new(0.0, 0.0); l];
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];

        let mut run = |get: &mut dyn FnMut(usize) -> C64, line: &mut [C64]| {
            for i in 0..l {
                line[(i + rot) % l] = get(i);
            }
            plan.process_with_scratch(line, &mut scratch);
        };

        for row in 0..l {
            let src = &data[row * l..(row + 1) * l];
            run(&mut |i| src[i], &mut line);
            let dst = &mut data[row * l..(row + 1) * l];
            for (i, d) in dst.iter_mut().enumerate() {
                *d = line[(i + rot) % l] * self.scale;
            }
        }
        for col in 0..l {
            run(&mut |i| data[i * l + col], &mut line);
            for i in 0..l {
                data[i * l + col] = line[(i + rot) % l] * self.scale;
            }
        }
    }
}

/// Converts a phase-basis wave function to the charge basis.
pub fn fourier_to_charge(psi: &WaveFunction) -> Result<WaveFunction> {
    if psi.basis() != Basis::Phase {
        return Err(Error::BasisMismatch {
            expected: Basis::Phase,
            found: psi.basis(),
        });
    }
    let mut amps = psi.amplitudes().to_vec();
    GridFft::new(psi.grid()).to_charge(&mut amps);
    WaveFunction::new(psi.grid(), Basis::Charge, amps)
}

/// Converts a charge-basis wave function to the phase basis.
pub fn fourier_to_phase(psi: &WaveFunction) -> Result<WaveFunction> {
    if psi.basis() != Basis::Charge {
        return Err(Error::BasisMismatch {
            expected: Basis::Charge,
            found: psi.basis(),
        });
    }
    let mut amps = psi.amplitudes().to_vec();
    GridFft::new(psi.grid()).to_phase(&mut amps);
    WaveFunction::new(psi.grid(), Basis::Phase, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_to_charge(grid: PhaseGrid, psi: &[C64]) -> Vec<C64> {
        let l = grid.len() as f64;
        let mut out = vec![C64::new(0.0, 0.0); grid.dim()];
        for (o, slot) in out.iter_mut().enumerate() {
            let (np, nm) = grid.labels_at(o);
            for (i, a) in psi.iter().enumerate() {
                let (kp, km) = grid.labels_at(i);
                let ph = -2.0 * PI * ((kp * np + km * nm) as f64) / l;
                *slot += a * C64::from_polar(1.0 / l, ph);
            }
        }
        out
    }

    #[test]
    fn matches_naive_kernel() {
        let grid = PhaseGrid::new(6).unwrap();
        let psi: Vec<C64> = (0..grid.dim())
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let expect = naive_to_charge(grid, &psi);
        let mut got = psi.clone();
        GridFft::new(grid).to_charge(&mut got);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_phase_is_charge_delta() {
        let grid = PhaseGrid::new(12).unwrap();
        let psi = WaveFunction::from_fn(grid, Basis::Phase, |_, _| C64::new(1.0 / 12.0, 0.0));
        let c = fourier_to_charge(&psi).unwrap();
        for (i, a) in c.amplitudes().iter().enumerate() {
            let want = if grid.labels_at(i) == (0, 0) {
                1.0
            } else {
                0.0
            };
            assert!((a - want).norm() < 1e-13);
        }
    }

    #[test]
    fn phase_delta_is_uniform_charge() {
        let grid = PhaseGrid::new(12).unwrap();
        let psi = WaveFunction::delta(grid, Basis::Phase, 0, 0);
        let c = fourier_to_charge(&psi).unwrap();
        for a in c.amplitudes() {
            assert!((a - 1.0 / 12.0).norm() < 1e-13);
        }
    }

    #[test]
    fn wrong_basis_is_rejected() {
        let grid = PhaseGrid::new(6).unwrap();
        let psi = WaveFunction::delta(grid, Basis::Charge, 0, 0);
        assert!(matches!(
            fourier_to_charge(&psi),
            Err(Error::BasisMismatch { .. })
        ));
    }
}
