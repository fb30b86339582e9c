// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense reference path for small grids.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::lanczos::{norm_estimate, EigenResult};
use crate::error::{invalid, Result};
use crate::lattice::{Basis, LinearMap, PhaseGrid, WaveFunction};

/// Largest dimension the dense path accepts (L = 60).
pub const DENSE_MAX_DIM: usize = 3600;

/// Materializes `map` column by column.
pub fn to_dense(map: &dyn LinearMap) -> Result<DMatrix<C64>> {
    let n = map.dim();
    if n > DENSE_MAX_DIM {
        return Err(invalid(
            "dim",
            format!("{n} exceeds dense limit {DENSE_MAX_DIM}"),
        ));
    }
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        map.apply_into(&e, &mut col);
        m.column_mut(j).copy_from_slice(&col);
        e[j] = C64::new(0.0, 0.0);
    }
    Ok(m)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn dense_eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Dense counterpart of `lowest_eigenpairs`.
pub fn dense_lowest(map: &dyn LinearMap, k: usize) -> Result<EigenResult> {
    let m = to_dense(map)?;
    let (values, vectors) = dense_eigh(&m);
    let k = k.min(values.len());
    let grid = map.grid();
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let v: DVector<C64> = vectors.column(j).into_owned();
        let r = &m * &v - v.scale(values[j]);
        residuals.push(r.norm());
        eigenvectors.push(WaveFunction::new(
            grid,
            map.basis(),
            v.iter().copied().collect(),
        )?);
    }
    Ok(EigenResult {
        eigenvalues: values[..k].to_vec(),
        eigenvectors,
        residuals,
        norm_estimate: norm_estimate(map, 0),
        seed: 0,
        matvecs: 0,
    })
}

/// Explicit matrix wrapped as a grid operator.
#[derive(Clone, Debug)]
pub struct DenseMap {
    grid: PhaseGrid,
    basis: Basis,
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl DenseMap {
    pub fn new(grid: PhaseGrid, basis: Basis, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != grid.dim() || matrix.ncols() != grid.dim() {
            return Err(invalid("matrix", "shape does not match grid"));
        }
        let hermitian = (&matrix - matrix.adjoint()).camax() <= 1e-12 * matrix.camax().max(1.0);
        Ok(Self {
            grid,
            basis,
            matrix,
            hermitian,
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

impl LinearMap for DenseMap {
    fn grid(&self) -> PhaseGrid {
        self.grid
    }
    fn basis(&self) -> Basis {
        self.basis
    }
    fn is_hermitian(&self) -> bool {
        self.hermitian
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.matrix.nrows();
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                acc += self.matrix[(i, j)] * xj;
            }
            *yi = acc;
        }
        debug_assert_eq!(n, x.len());
    }
}
