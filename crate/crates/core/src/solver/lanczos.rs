// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lanczos with full reorthogonalization, locking and explicit restarts.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{dot, norm, LinearMap, WaveFunction};

/// Iterations of the power estimate for ‖H‖.
pub const NORM_POWER_ITERATIONS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenConfig {
    /// Residual target relative to the ‖H‖ estimate.
    pub tol: f64,
    /// Krylov basis size before a restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_basis: 160,
            max_restarts: 60,
            seed: 0x00c0_ffee,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<WaveFunction>,
    pub residuals: Vec<f64>,
    pub norm_estimate: f64,
    pub seed: u64,
    pub matvecs: usize,
}

/// Restriction applied to every Krylov vector (must be an orthogonal
/// projector commuting with H).
pub type Projector<'a> = &'a (dyn Fn(&mut [C64]) + Sync);

fn random_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

fn axpy(a: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn scale(a: f64, x: &mut [C64]) {
    x.iter_mut().for_each(|v| *v *= a);
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize(w: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, w);
            axpy(-c, b, w);
        }
    }
}

/// Largest ‖Hx‖/‖x‖ seen over [`NORM_POWER_ITERATIONS`] power steps.
pub fn norm_estimate(h: &dyn LinearMap, seed: u64) -> f64 {
    let mut x = random_vector(h.dim(), seed ^ 0x9e37_79b9);
    let mut est = 0.0_f64;
    for _ in 0..NORM_POWER_ITERATIONS {
        let n = norm(&x);
        if n == 0.0 {
            break;
        }
        scale(1.0 / n, &mut x);
        let y = h.apply(&x);
        est = est.max(norm(&y));
        x = y;
    }
    est
}

pub fn lowest_eigenpairs(h: &dyn LinearMap, k: usize, cfg: &EigenConfig) -> Result<EigenResult> {
    solve(h, k, cfg, None)
}

/// As [`lowest_eigenpairs`], restricted to the range of `projector`.
pub fn lowest_eigenpairs_constrained(
    h: &dyn LinearMap,
    k: usize,
    cfg: &EigenConfig,
    projector: Projector<'_>,
) -> Result<EigenResult> {
    solve(h, k, cfg, Some(projector))
}

struct Ritz {
    value: f64,
    vector: Vec<C64>,
    residual: f64,
}

fn solve(
    h: &dyn LinearMap,
    k: usize,
    cfg: &EigenConfig,
    proj: Option<Projector<'_>>,
) -> Result<EigenResult> {
    if k == 0 {
        return Err(invalid("k", "at least one eigenpair must be requested"));
    }
    if !h.is_hermitian() {
        return Err(invalid("h", "operator is not flagged Hermitian"));
    }
    if !(cfg.tol > 0.0) || cfg.max_basis < 2 {
        return Err(invalid("eigen", "tol must be positive and max_basis >= 2"));
    }
    let n = h.dim();
    let h_norm = norm_estimate(h, cfg.seed).max(f64::MIN_POSITIVE);
    let mut matvecs = NORM_POWER_ITERATIONS;
    let mut locked: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);

    for j in 0..k {
        let start = random_vector(n, cfg.seed.wrapping_add(j as u64));
        let r = lowest_one(h, start, &locked, cfg, h_norm, proj, &mut matvecs)?;
        values.push(r.value);
        residuals.push(r.residual);
        locked.push(r.vector);
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let grid = h.grid();
    let basis = h.basis();
    Ok(EigenResult {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        eigenvectors: order
            .iter()
            .map(|&i| WaveFunction::new(grid, basis, locked[i].clone()).expect("grid-sized vector"))
            .collect(),
        norm_estimate: h_norm,
        seed: cfg.seed,
        matvecs,
    })
}

fn lowest_one(
    h: &dyn LinearMap,
    start: Vec<C64>,
    locked: &[Vec<C64>],
    cfg: &EigenConfig,
    h_norm: f64,
    proj: Option<Projector<'_>>,
    matvecs: &mut usize,
) -> Result<Ritz> {
    let target = cfg.tol * h_norm;
    let breakdown = 1e-13 * h_norm;
    let mut v0 = start;
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    let prepare = |v: &mut Vec<C64>| -> f64 {
        if let Some(p) = proj {
            p(v);
        }
        orthogonalize(v, locked);
        let nv = norm(v);
        if nv > 0.0 {
            scale(1.0 / nv, v);
        }
        nv
    };

    for restart in 0..=cfg.max_restarts {
        if prepare(&mut v0) < 1e-12 {
            // Start vector fell into the locked space; draw a fresh one.
            v0 = random_vector(
                h.dim(),
                cfg.seed ^ (0xabcd + restart as u64 + locked.len() as u64 * 977),
            );
            if prepare(&mut v0) < 1e-12 {
                return Err(invalid(
                    "k",
                    "requested more eigenpairs than the constrained space holds",
                ));
            }
        }
        let mut basis: Vec<Vec<C64>> = vec![v0.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();

        loop {
            let m = basis.len();
            let mut w = h.apply(&basis[m - 1]);
            *matvecs += 1;
            iterations += 1;
            let a = dot(&basis[m - 1], &w).re;
            alpha.push(a);
            axpy(C64::new(-a, 0.0), &basis[m - 1], &mut w);
            if m > 1 {
                axpy(C64::new(-beta[m - 2], 0.0), &basis[m - 2], &mut w);
            }
            if let Some(p) = proj {
                p(&mut w);
            }
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &basis);
            let b = norm(&w);

            let exhausted = b < breakdown;
            let full = m >= cfg.max_basis;
            if exhausted || full || m % 4 == 0 {
                let (theta, s) = lowest_ritz(&alpha, &beta);
                let est = if exhausted { 0.0 } else { b * s[m - 1].abs() };
                if est <= target || exhausted || full {
                    let mut x = vec![C64::new(0.0, 0.0); h.dim()];
                    for (si, vi) in s.iter().zip(&basis) {
                        axpy(C64::new(*si, 0.0), vi, &mut x);
                    }
                    let nx = norm(&x);
                    scale(1.0 / nx, &mut x);
                    let mut r = h.apply(&x);
                    *matvecs += 1;
                    axpy(C64::new(-theta, 0.0), &x, &mut r);
                    let res = norm(&r);
                    best = best.min(res);
                    if res <= target {
                        return Ok(Ritz {
                            value: theta,
                            vector: x,
                            residual: res,
                        });
                    }
                    v0 = x;
                    break;
                }
            }
            scale(1.0 / b, &mut w);
            beta.push(b);
            basis.push(w);
        }
    }
    Err(Error::NonConvergence {
        iterations,
        best_residual: best,
    })
}

/// Lowest eigenpair of the real symmetric tridiagonal matrix (α, β).
fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    (
        eig.eigenvalues[idx],
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{diag_operator, Basis, PhaseGrid};

    #[test]
    fn diagonal_operator_lowest_values() {
        let g = PhaseGrid::new(12).unwrap();
        let v = diag_operator(g, |a, b| a.cos() + 2.0 * b.cos());
        let r = lowest_eigenpairs(&v, 3, &EigenConfig::default()).unwrap();
        assert!((r.eigenvalues[0] + 3.0).abs() < 1e-9);
        for (i, x) in r.eigenvectors.iter().enumerate() {
            assert!((x.norm() - 1.0).abs() < 1e-12);
            for y in &r.eigenvectors[..i] {
                assert!(x.inner(y).unwrap().norm() < 1e-8);
            }
            assert!(r.residuals[i] <= 1e-10 * r.norm_estimate);
        }
        assert_eq!(r.eigenvectors[0].basis(), Basis::Phase);
    }

    #[test]
    fn deterministic() {
        let g = PhaseGrid::new(12).unwrap();
        let v = diag_operator(g, |a, b| (a - 0.3).sin() * b.cos());
        let cfg = EigenConfig::default();
        let a = lowest_eigenpairs(&v, 2, &cfg).unwrap();
        let b = lowest_eigenpairs(&v, 2, &cfg).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn nonconvergence_reports_residual() {
        let g = PhaseGrid::new(36).unwrap();
        let v = diag_operator(g, |a, b| (3.0 * a).cos() * b.sin() + 0.01 * a);
        let cfg = EigenConfig {
            tol: 1e-15,
            max_basis: 4,
            max_restarts: 1,
            ..Default::default()
        };
        match lowest_eigenpairs(&v, 1, &cfg) {
            Err(Error::NonConvergence { best_residual, .. }) => assert!(best_residual.is_finite()),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
