// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Norm-preserving evolution ψ(t) = e^{−iHt}ψ₀.
//!
//! States are emitted on the uniform grid t = 0, dt, 2dt, …, t_final.
//! Between emissions each method takes as many internal steps as it needs.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::bessel::bessel_j_sequence;
use super::dense::{dense_eigh, to_dense};
use super::lanczos::norm_estimate;
use crate::error::{invalid, Error, Result};
use crate::lattice::{dot, norm, LinearMap, WaveFunction};

/// Largest accepted drift of ‖ψ‖² at an emitted sample.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagatorMethod {
    Krylov,
    Chebyshev,
    DenseOracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagatorConfig {
    /// Chebyshev by default: Krylov steps shrink once the state spreads in charge.
    pub method: PropagatorMethod,
    /// Emission interval.
    pub dt: f64,
    pub krylov_dim: usize,
    /// Upper bound on the Chebyshev order per emission interval.
    pub chebyshev_order: Option<usize>,
    /// Local error target per internal step.
    pub tol: f64,
    /// Spectral bounds for Chebyshev; estimated when absent.
    pub spectral_bounds: Option<(f64, f64)>,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            method: PropagatorMethod::Chebyshev,
            dt: 0.01,
            krylov_dim: 30,
            chebyshev_order: None,
            tol: 1e-12,
            spectral_bounds: None,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        if self.krylov_dim < 2 {
            return Err(invalid("krylov_dim", "must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PropagationStats {
    pub emitted: usize,
    pub steps: usize,
    pub rejected: usize,
    pub matvecs: usize,
    pub max_norm_drift: f64,
}

/// Emission times 0, dt, …, with t_final appended when it is not a multiple of dt.
pub fn emission_times(t_final: f64, dt: f64) -> Vec<f64> {
    let n = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    if t_final - ts[n] > 1e-9 * dt {
        ts.push(t_final);
    }
    ts
}

/// Evolves `psi0` and hands every emitted state to `observer`.
///
/// The state passed to the observer is in the operator basis.
pub fn propagate_observed(
    h: &dyn LinearMap,
    psi0: &WaveFunction,
    t_final: f64,
    cfg: &PropagatorConfig,
    observer: &mut dyn FnMut(f64, &WaveFunction) -> Result<()>,
) -> Result<PropagationStats> {
    cfg.validate()?;
    if !(t_final >= 0.0) {
        return Err(invalid("t_final", "must be non-negative"));
    }
    if (psi0.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
        return Err(invalid(
            "psi0",
            format!("not normalized (norm^2 = {})", psi0.norm_sqr()),
        ));
    }
    let times = emission_times(t_final, cfg.dt);
    let mut psi = psi0.to_basis(h.basis())?;
    let mut stats = PropagationStats::default();
    let mut stepper: Box<dyn Stepper + '_> = match cfg.method {
        PropagatorMethod::Krylov => Box::new(KrylovStepper::new(h, cfg)),
        PropagatorMethod::Chebyshev => Box::new(ChebyshevStepper::new(h, cfg, &mut stats)?),
        PropagatorMethod::DenseOracle => Box::new(DenseStepper::new(h, psi.amplitudes())?),
    };

    observer(times[0], &psi)?;
    stats.emitted = 1;
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        stepper.advance(psi.amplitudes_mut(), t0, t1 - t0, &mut stats)?;
        let drift = (psi.norm_sqr() - 1.0).abs();
        stats.max_norm_drift = stats.max_norm_drift.max(drift);
        if drift > NORM_TOLERANCE {
            return Err(Error::Propagation {
                t: t1,
                reason: format!("norm drift {drift:.3e}"),
            });
        }
        observer(t1, &psi)?;
        stats.emitted += 1;
    }
    Ok(stats)
}

/// Collects every emitted state.
pub fn propagate(
    h: &dyn LinearMap,
    psi0: &WaveFunction,
    t_final: f64,
    cfg: &PropagatorConfig,
) -> Result<Vec<(f64, WaveFunction)>> {
    let mut out = Vec::new();
    propagate_observed(h, psi0, t_final, cfg, &mut |t, psi| {
        out.push((t, psi.clone()));
        Ok(())
    })?;
    Ok(out)
}

/// 1 − |⟨ψ_dt|ψ_dt/2⟩|² at t_final.
pub fn step_doubling_infidelity(
    h: &dyn LinearMap,
    psi0: &WaveFunction,
    t_final: f64,
    cfg: &PropagatorConfig,
) -> Result<f64> {
    let last = |c: &PropagatorConfig| -> Result<WaveFunction> {
        let mut keep = None;
        propagate_observed(h, psi0, t_final, c, &mut |_, psi| {
            keep = Some(psi.clone());
            Ok(())
        })?;
        Ok(keep.expect("at least one emission"))
    };
    let a = last(cfg)?;
    let b = last(&PropagatorConfig {
        dt: cfg.dt / 2.0,
        ..cfg.clone()
    })?;
    Ok(1.0 - a.inner(&b)?.norm_sqr())
}

trait Stepper {
    fn advance(
        &mut self,
        psi: &mut [C64],
        t: f64,
        delta: f64,
        stats: &mut PropagationStats,
    ) -> Result<()>;
}

struct KrylovStepper<'a> {
    h: &'a dyn LinearMap,
    m: usize,
    tol: f64,
    h_norm: f64,
    last_step: f64,
}

impl<'a> KrylovStepper<'a> {
    fn new(h: &'a dyn LinearMap, cfg: &PropagatorConfig) -> Self {
        let h_norm = norm_estimate(h, 7).max(f64::MIN_POSITIVE);
        Self {
            h,
            m: cfg.krylov_dim.min(h.dim()),
            tol: cfg.tol,
            h_norm,
            last_step: f64::INFINITY,
        }
    }
}

impl Stepper for KrylovStepper<'_> {
    fn advance(
        &mut self,
        psi: &mut [C64],
        t: f64,
        delta: f64,
        stats: &mut PropagationStats,
    ) -> Result<()> {
        let mut done = 0.0;
        while delta - done > 1e-14 * delta.max(1.0) {
            let beta0 = norm(psi);
            let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|v| v / beta0).collect()];
            let mut alpha = Vec::with_capacity(self.m);
            let mut beta = Vec::with_capacity(self.m);
            let mut tail = 0.0;
            for j in 0..self.m {
                let mut w = self.h.apply(&basis[j]);
                stats.matvecs += 1;
                let a = dot(&basis[j], &w).re;
                alpha.push(a);
                for _ in 0..2 {
                    for b in &basis {
                        let c = dot(b, &w);
                        w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
                    }
                }
                let b = norm(&w);
                if b < 1e-13 * self.h_norm {
                    tail = 0.0;
                    break;
                }
                tail = b;
                if j + 1 == self.m {
                    break;
                }
                beta.push(b);
                w.iter_mut().for_each(|v| *v /= b);
                basis.push(w);
            }
            let k = alpha.len();
            let t_mat = DMatrix::from_fn(k, k, |i, j| {
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
            let eig = SymmetricEigen::new(t_mat);
            let coeffs = |tau: f64| -> Vec<C64> {
                (0..k)
                    .map(|r| {
                        (0..k)
                            .map(|c| {
                                let q = eig.eigenvectors[(r, c)] * eig.eigenvectors[(0, c)];
                                C64::from_polar(q, -eig.eigenvalues[c] * tau)
                            })
                            .sum()
                    })
                    .collect()
            };
            let mut tau = (delta - done).min(self.last_step);
            loop {
                let c = coeffs(tau);
                let err = tail * c[k - 1].norm();
                let norm_c: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let drift = (norm_c - 1.0).abs();
                if err <= self.tol && drift <= 1e-12 {
                    psi.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    for (ci, bi) in c.iter().zip(&basis) {
                        let s = ci * beta0;
                        psi.iter_mut().zip(bi).for_each(|(p, b)| *p += s * b);
                    }
                    done += tau;
                    stats.steps += 1;
                    let grow = if err > 0.0 {
                        0.9 * (self.tol / err).powf(1.0 / k as f64)
                    } else {
                        2.0
                    };
                    self.last_step = tau * grow.clamp(1.0, 2.0);
                    break;
                }
                stats.rejected += 1;
                tau *= 0.5;
                if tau < 1e-12 * delta {
                    return Err(Error::Propagation {
                        t: t + done,
                        reason: format!(
                            "tolerance {} not reachable with krylov_dim {}",
                            self.tol, self.m
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

struct ChebyshevStepper<'a> {
    h: &'a dyn LinearMap,
    center: f64,
    half_width: f64,
    tol: f64,
    max_order: Option<usize>,
}

impl<'a> ChebyshevStepper<'a> {
    fn new(
        h: &'a dyn LinearMap,
        cfg: &PropagatorConfig,
        stats: &mut PropagationStats,
    ) -> Result<Self> {
        let (lo, hi) = match cfg.spectral_bounds {
            Some(b) => b,
            None => estimate_bounds(h, stats),
        };
        if !(hi > lo) {
            return Err(invalid(
                "spectral_bounds",
                "upper bound must exceed lower bound",
            ));
        }
        Ok(Self {
            h,
            center: 0.5 * (hi + lo),
            half_width: 0.5 * (hi - lo),
            tol: cfg.tol,
            max_order: cfg.chebyshev_order,
        })
    }
}

/// Extremal Ritz values of a short Lanczos run, widened by a safety margin.
fn estimate_bounds(h: &dyn LinearMap, stats: &mut PropagationStats) -> (f64, f64) {
    let n = h.dim();
    let steps = 40.min(n);
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(((i * 7919) % 104_729) as f64 / 104_729.0 - 0.5, 0.1))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis = vec![v];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for j in 0..steps {
        let mut w = h.apply(&basis[j]);
        stats.matvecs += 1;
        alpha.push(dot(&basis[j], &w).re);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let b = norm(&w);
        if b < 1e-12 || j + 1 == steps {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| match i.abs_diff(j) {
        0 => alpha[i],
        1 => beta[i.min(j)],
        _ => 0.0,
    });
    let ev = SymmetricEigen::new(t).eigenvalues;
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let margin = 0.05 * (hi - lo) + 1e-6 * hi.abs().max(lo.abs()).max(1.0);
    (lo - margin, hi + margin)
}

impl Stepper for ChebyshevStepper<'_> {
    fn advance(
        &mut self,
        psi: &mut [C64],
        t: f64,
        delta: f64,
        stats: &mut PropagationStats,
    ) -> Result<()> {
        let r = self.half_width * delta;
        // Order where the Bessel tail is below tol.
        let probe = bessel_j_sequence(r, (r * 1.5) as usize + 60);
        let mut order = probe.len() - 1;
        for k in (r.ceil() as usize)..probe.len() {
            if probe[k].abs() < 1e-3 * self.tol {
                order = k;
                break;
            }
        }
        if let Some(max) = self.max_order {
            if order > max {
                return Err(Error::Propagation {
                    t,
                    reason: format!("chebyshev order {order} exceeds configured {max}"),
                });
            }
        }
        let j = &probe[..=order];
        let n = psi.len();
        let inv = 1.0 / self.half_width;
        let scaled = |x: &[C64], y: &mut Vec<C64>| {
            *y = self.h.apply(x);
            y.iter_mut()
                .zip(x)
                .for_each(|(yi, xi)| *yi = (*yi - xi * self.center) * inv);
        };
        let mut t_prev: Vec<C64> = psi.to_vec();
        let mut t_cur = vec![C64::new(0.0, 0.0); n];
        scaled(&t_prev, &mut t_cur);
        stats.matvecs += 1;
        let mut acc: Vec<C64> = t_prev.iter().map(|v| v * j[0]).collect();
        let mut phase = C64::new(0.0, -1.0);
        for (k, jk) in j.iter().enumerate().skip(1) {
            let c = phase * (2.0 * jk);
            acc.iter_mut().zip(&t_cur).for_each(|(a, v)| *a += c * v);
            if k == order {
                break;
            }
            let mut next = vec![C64::new(0.0, 0.0); n];
            scaled(&t_cur, &mut next);
            stats.matvecs += 1;
            next.iter_mut()
                .zip(&t_prev)
                .for_each(|(nx, p)| *nx = 2.0 * *nx - p);
            t_prev = std::mem::replace(&mut t_cur, next);
            phase *= C64::new(0.0, -1.0);
        }
        let global = C64::from_polar(1.0, -self.center * delta);
        psi.iter_mut().zip(&acc).for_each(|(p, a)| *p = global * a);
        stats.steps += 1;
        Ok(())
    }
}

struct DenseStepper {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
    /// V†ψ₀.
    initial: Vec<C64>,
}

impl DenseStepper {
    fn new(h: &dyn LinearMap, psi0: &[C64]) -> Result<Self> {
        let (values, vectors) = dense_eigh(&to_dense(h)?);
        let p = nalgebra::DVector::from_column_slice(psi0);
        let initial = (vectors.adjoint() * p).iter().copied().collect();
        Ok(Self {
            values,
            vectors,
            initial,
        })
    }
}

impl Stepper for DenseStepper {
    fn advance(
        &mut self,
        psi: &mut [C64],
        t: f64,
        delta: f64,
        stats: &mut PropagationStats,
    ) -> Result<()> {
        // Exact evolution from t = 0 avoids accumulating round-off.
        let t1 = t + delta;
        let c: Vec<C64> = self
            .values
            .iter()
            .zip(&self.initial)
            .map(|(e, a)| a * C64::from_polar(1.0, -e * t1))
            .collect();
        let out = &self.vectors * nalgebra::DVector::from_vec(c);
        psi.copy_from_slice(out.as_slice());
        stats.steps += 1;
        Ok(())
    }
}
