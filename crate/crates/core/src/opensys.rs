// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Local charge decay L_k = e^{−iφ_k} on a truncated three-node charge basis.
//!
//! The basis is |n₁, n₂, n₃⟩ with labels in [−n_max, n_max]. Two boundary
//! treatments are offered. `Cyclic` identifies n and n + (2n_max + 1), so
//! L_k is a unitary permutation and plane waves with phases in
//! (2π/(2n_max+1))ℤ are exact. `HardCutoff` drops amplitude pushed below
//! −n_max and reports the lost weight.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ring::RingParams;

/// Largest accepted basis dimension (n_max = 7).
pub const DEFAULT_DIM_CAP: usize = 15 * 15 * 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Cyclic,
    HardCutoff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedRingSpace {
    n_max: usize,
    boundary: Boundary,
}

impl TruncatedRingSpace {
    pub fn new(n_max: usize, boundary: Boundary) -> Result<Self> {
        Self::with_cap(n_max, boundary, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n_max: usize, boundary: Boundary, cap: usize) -> Result<Self> {
        let side = 2 * n_max + 1;
        if side.pow(3) > cap {
            return Err(invalid(
                "n_max",
                format!("dimension {} exceeds cap {cap}", side.pow(3)),
            ));
        }
        Ok(Self { n_max, boundary })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn side(&self) -> usize {
        2 * self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.side().pow(3)
    }

    /// Flat index of (n₁, n₂, n₃); n₁ outermost.
    pub fn index(&self, n: [i64; 3]) -> Option<usize> {
        let m = self.n_max as i64;
        let side = self.side() as i64;
        let mut idx = 0usize;
        for &v in &n {
            let v = match self.boundary {
                Boundary::Cyclic => (v + m).rem_euclid(side),
                Boundary::HardCutoff if v.abs() <= m => v + m,
                Boundary::HardCutoff => return None,
            };
            idx = idx * side as usize + v as usize;
        }
        Some(idx)
    }

    pub fn labels(&self, idx: usize) -> [i64; 3] {
        let side = self.side();
        let m = self.n_max as i64;
        [idx / (side * side), (idx / side) % side, idx % side].map(|v| v as i64 - m)
    }

    /// Total charge sector of a basis state; reduced mod 2n_max+1 when cyclic.
    pub fn sector(&self, idx: usize) -> i64 {
        let n: i64 = self.labels(idx).iter().sum();
        self.reduce_sector(n)
    }

    pub fn reduce_sector(&self, n: i64) -> i64 {
        match self.boundary {
            Boundary::Cyclic => {
                let m = self.n_max as i64;
                (n + m).rem_euclid(self.side() as i64) - m
            }
            Boundary::HardCutoff => n,
        }
    }

    /// All sectors present, ascending.
    pub fn sectors(&self) -> Vec<i64> {
        let m = self.n_max as i64;
        match self.boundary {
            Boundary::Cyclic => (-m..=m).collect(),
            Boundary::HardCutoff => (-3 * m..=3 * m).collect(),
        }
    }

    /// Image of each basis state under n_k → n_k + delta (`None` when cut).
    fn shifted(&self, delta: [i64; 3]) -> Vec<Option<usize>> {
        (0..self.dim())
            .map(|i| {
                let l = self.labels(i);
                self.index([l[0] + delta[0], l[1] + delta[1], l[2] + delta[2]])
            })
            .collect()
    }

    /// Image of each basis state under L_k, k ∈ {1, 2, 3}.
    fn lowering(&self, k: usize) -> Vec<Option<usize>> {
        let mut d = [0; 3];
        d[k - 1] = -1;
        self.shifted(d)
    }

    /// |m₁,m₂,m₃⟩ → |m₂,m₃,m₁⟩.
    fn p123(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                let l = self.labels(i);
                self.index([l[1], l[2], l[0]])
                    .expect("permutation stays in the box")
            })
            .collect()
    }

    /// Normalized ∝ Σ_{n₁+n₂+n₃=N} e^{−i(n₂φ₂ + n₃φ₃)} |n₁,n₂,n₃⟩.
    pub fn plane_wave(&self, n: i64, phi2: f64, phi3: f64) -> Result<DVector<C64>> {
        let target = self.reduce_sector(n);
        let mut v = DVector::from_element(self.dim(), C64::new(0.0, 0.0));
        for i in 0..self.dim() {
            if self.sector(i) == target {
                let l = self.labels(i);
                v[i] = C64::from_polar(1.0, -(l[1] as f64 * phi2 + l[2] as f64 * phi3));
            }
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(invalid("n", format!("sector {n} is empty")));
        }
        Ok(v.unscale(norm))
    }

    /// True when e^{−inφ} is single-valued on the cyclic labels.
    pub fn phase_commensurate(&self, phi: f64) -> bool {
        let x = phi * self.side() as f64 / (2.0 * PI);
        (x - x.round()).abs() < 1e-9
    }
}

/// L_k ψ together with the squared norm lost at the boundary.
pub fn jump_action(
    space: &TruncatedRingSpace,
    k: usize,
    psi: &DVector<C64>,
) -> Result<(DVector<C64>, f64)> {
    if !(1..=3).contains(&k) {
        return Err(invalid("k", format!("node index {k} not in 1..=3")));
    }
    if psi.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: psi.len(),
        });
    }
    let map = space.lowering(k);
    let mut out = DVector::from_element(space.dim(), C64::new(0.0, 0.0));
    let mut dropped = 0.0;
    for (i, t) in map.iter().enumerate() {
        match t {
            Some(j) => out[*j] += psi[i],
            None => dropped += psi[i].norm_sqr(),
        }
    }
    Ok((out, dropped))
}

/// Ring Hamiltonian on the three-node charge basis.
#[derive(Clone, Debug)]
pub struct ThreeNodeHamiltonian {
    space: TruncatedRingSpace,
    diagonal: Vec<f64>,
    hops: Vec<(Vec<Option<usize>>, C64)>,
}

impl ThreeNodeHamiltonian {
    pub fn new(space: TruncatedRingSpace, p: &RingParams) -> Result<Self> {
        p.validate()?;
        let [e1, e2, e3] = p.junction_energies();
        let a = p.phi_e / 3.0;
        let ph = |s: f64| C64::from_polar(1.0, s * a);
        let terms: [([i64; 3], C64); 6] = [
            ([-1, 1, 0], -0.5 * e1 * ph(-1.0)),
            ([1, -1, 0], -0.5 * e1 * ph(1.0)),
            ([-1, 0, 1], -0.5 * e3 * ph(1.0)),
            ([1, 0, -1], -0.5 * e3 * ph(-1.0)),
            ([0, 1, -1], -0.5 * e2 * ph(1.0)),
            ([0, -1, 1], -0.5 * e2 * ph(-1.0)),
        ];
        let hops = terms.iter().map(|(d, c)| (space.shifted(*d), *c)).collect();
        let diagonal = (0..space.dim())
            .map(|i| {
                let [n1, n2, n3] = space.labels(i).map(|v| v as f64);
                let n = n1 + n2 + n3;
                let plus = n2 + n3 - 2.0 * n / 3.0;
                let minus = n2 - n3;
                0.5 * p.e_c * (3.0 * plus * plus + minus * minus) + (p.e_n + p.e_c / 3.0) * n * n
            })
            .collect();
        Ok(Self {
            space,
            diagonal,
            hops,
        })
    }

    pub fn space(&self) -> TruncatedRingSpace {
        self.space
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.space.dim();
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for i in 0..n {
            m[(i, i)] = C64::new(self.diagonal[i], 0.0);
        }
        for (map, c) in &self.hops {
            for (j, t) in map.iter().enumerate() {
                if let Some(i) = t {
                    m[(*i, j)] += c;
                }
            }
        }
        m
    }

    /// y = H x for every column of x.
    fn apply_columns(&self, x: &DMatrix<C64>, y: &mut DMatrix<C64>) {
        let n = self.space.dim();
        for c in 0..n {
            let xc = x.column(c);
            let mut yc = y.column_mut(c);
            for i in 0..n {
                yc[i] = xc[i] * self.diagonal[i];
            }
            for (map, coef) in &self.hops {
                for (j, t) in map.iter().enumerate() {
                    if let Some(i) = t {
                        yc[*i] += coef * xc[j];
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: TruncatedRingSpace,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(space: TruncatedRingSpace, m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: m.nrows(),
            });
        }
        let rho = Self { space, m };
        if rho.hermiticity_defect() > 1e-10 {
            return Err(invalid("rho", "not Hermitian"));
        }
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return Err(invalid("rho", format!("trace {} != 1", rho.trace())));
        }
        Ok(rho)
    }

    /// |ψ⟩⟨ψ| for a normalized ψ.
    pub fn pure(space: TruncatedRingSpace, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: psi.len(),
            });
        }
        Self::new(space, psi * psi.adjoint())
    }

    pub fn space(&self) -> TruncatedRingSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.m - self.m.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation(&self, psi: &DVector<C64>) -> f64 {
        psi.dotc(&(&self.m * psi)).re
    }

    /// (sector, population) for every sector.
    pub fn sector_populations(&self) -> Vec<(i64, f64)> {
        let sectors = self.space.sectors();
        let lo = sectors[0];
        let mut pops = vec![0.0; sectors.len()];
        for i in 0..self.space.dim() {
            pops[(self.space.sector(i) - lo) as usize] += self.m[(i, i)].re;
        }
        sectors.into_iter().zip(pops).collect()
    }

    /// (sector, population, ⟨χ⟩ within the sector) with χ = (P₁₂₃ − P₁₃₂)/2i.
    pub fn sector_chirality(&self) -> Vec<(i64, f64, f64)> {
        let p = self.space.p123();
        let sectors = self.space.sectors();
        let lo = sectors[0];
        let mut tr = vec![C64::new(0.0, 0.0); sectors.len()];
        // Tr(Π_N P ρ) = Σ_{m ∈ N} ⟨p(m)|ρ... written as Σ_m ρ[m, p(m)].
        for (m, &pm) in p.iter().enumerate() {
            tr[(self.space.sector(m) - lo) as usize] += self.m[(m, pm)];
        }
        self.sector_populations()
            .into_iter()
            .zip(tr)
            .map(|((n, pop), t)| (n, pop, if pop > 0.0 { t.im / pop } else { 0.0 }))
            .collect()
    }

    /// (sector, population, ⟨N,φ₂,φ₃|ρ|N,φ₂,φ₃⟩) for every populated sector.
    pub fn sector_fidelity(&self, phi2: f64, phi3: f64) -> Result<Vec<(i64, f64, f64)>> {
        let mut out = Vec::new();
        for (n, pop) in self.sector_populations() {
            if pop <= 0.0 {
                continue;
            }
            let v = self.space.plane_wave(n, phi2, phi3)?;
            out.push((n, pop, self.expectation(&v)));
        }
        Ok(out)
    }

    /// max_k ‖[ρ, L_k]‖_max.
    pub fn jump_commutator(&self) -> f64 {
        let n = self.space.dim();
        let mut worst = 0.0_f64;
        for k in 1..=3 {
            let map = self.space.lowering(k);
            let mut lm = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
            for (j, t) in map.iter().enumerate() {
                if let Some(i) = t {
                    lm[(*i, j)] = C64::new(1.0, 0.0);
                }
            }
            worst = worst.max((&self.m * &lm - &lm * &self.m).camax());
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindbladConfig {
    /// RK4 step.
    pub dt: f64,
    /// Emission interval.
    pub sample_dt: f64,
    /// Most negative eigenvalue tolerated at an emitted sample.
    pub positivity_tol: f64,
    pub check_positivity: bool,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            sample_dt: 0.1,
            positivity_tol: 1e-8,
            check_positivity: true,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LindbladStats {
    pub steps: usize,
    pub emitted: usize,
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
}

struct Generator<'a> {
    h: Option<&'a ThreeNodeHamiltonian>,
    gamma: f64,
    jumps: Vec<Vec<Option<usize>>>,
    /// Diagonal of Σ_k L_k†L_k.
    loss: Vec<f64>,
}

impl<'a> Generator<'a> {
    fn new(space: TruncatedRingSpace, h: Option<&'a ThreeNodeHamiltonian>, gamma: f64) -> Self {
        let jumps: Vec<_> = (1..=3).map(|k| space.lowering(k)).collect();
        let loss = (0..space.dim())
            .map(|i| jumps.iter().filter(|m| m[i].is_some()).count() as f64)
            .collect();
        Self {
            h,
            gamma,
            jumps,
            loss,
        }
    }

    /// out = 𝓛(ρ) for Hermitian ρ.
    fn apply(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>, scratch: &mut DMatrix<C64>) {
        let n = rho.nrows();
        out.fill(C64::new(0.0, 0.0));
        if let Some(h) = self.h {
            h.apply_columns(rho, scratch);
            // −i[H, ρ] = −i(A − A†) with A = Hρ.
            for j in 0..n {
                for i in 0..n {
                    let d = scratch[(i, j)] - scratch[(j, i)].conj();
                    out[(i, j)] = C64::new(d.im, -d.re);
                }
            }
        }
        if self.gamma == 0.0 {
            return;
        }
        for map in &self.jumps {
            for (b, tb) in map.iter().enumerate() {
                let Some(jb) = tb else { continue };
                for (a, ta) in map.iter().enumerate() {
                    if let Some(ia) = ta {
                        out[(*ia, *jb)] += self.gamma * rho[(a, b)];
                    }
                }
            }
        }
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] -= 0.5 * self.gamma * (self.loss[i] + self.loss[j]) * rho[(i, j)];
            }
        }
    }
}

fn axpy(y: &mut DMatrix<C64>, a: C64, x: &DMatrix<C64>) {
    y.iter_mut().zip(x.iter()).for_each(|(y, x)| *y += a * x);
}

fn hermitize(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..=j {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Integrates dρ/dt = −i[H, ρ] + γ Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}) with RK4,
/// emitting at multiples of `sample_dt`.
pub fn lindblad_evolve_observed(
    rho0: &DensityMatrix,
    h: Option<&ThreeNodeHamiltonian>,
    gamma: f64,
    t_final: f64,
    cfg: &LindbladConfig,
    observer: &mut dyn FnMut(f64, &DensityMatrix) -> Result<()>,
) -> Result<LindbladStats> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", "must be non-negative"));
    }
    if !(cfg.dt > 0.0 && cfg.sample_dt >= cfg.dt) {
        return Err(invalid("dt", "need 0 < dt <= sample_dt"));
    }
    if !(t_final >= 0.0) {
        return Err(invalid("t_final", "must be non-negative"));
    }
    let space = rho0.space;
    if let Some(h) = h {
        if h.space != space {
            return Err(invalid("h", "built on a different truncated space"));
        }
    }
    let gen = Generator::new(space, h, gamma);
    let n = space.dim();
    let zero = || DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    let (mut k1, mut k2, mut k3, mut k4, mut tmp, mut scratch) =
        (zero(), zero(), zero(), zero(), zero(), zero());
    let mut rho = rho0.clone();
    let mut stats = LindbladStats {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    };

    let per_sample = (cfg.sample_dt / cfg.dt).round().max(1.0) as usize;
    let h_step = cfg.sample_dt / per_sample as f64;
    let samples = crate::solver::emission_times(t_final, cfg.sample_dt);

    let mut emit = |t: f64, rho: &DensityMatrix, stats: &mut LindbladStats| -> Result<()> {
        stats.max_trace_drift = stats.max_trace_drift.max((rho.trace() - 1.0).abs());
        if cfg.check_positivity {
            let min = rho.min_eigenvalue();
            stats.min_eigenvalue = stats.min_eigenvalue.min(min);
            if min < -cfg.positivity_tol {
                return Err(Error::Positivity {
                    t,
                    min_eigenvalue: min,
                });
            }
        }
        stats.emitted += 1;
        observer(t, rho)
    };
    emit(0.0, &rho, &mut stats)?;
    for w in samples.windows(2) {
        let span = w[1] - w[0];
        let steps = ((span / h_step).round() as usize).max(1);
        let dt = span / steps as f64;
        for _ in 0..steps {
            let r = &rho.m;
            gen.apply(r, &mut k1, &mut scratch);
            tmp.copy_from(r);
            axpy(&mut tmp, C64::new(0.5 * dt, 0.0), &k1);
            gen.apply(&tmp, &mut k2, &mut scratch);
            tmp.copy_from(r);
            axpy(&mut tmp, C64::new(0.5 * dt, 0.0), &k2);
            gen.apply(&tmp, &mut k3, &mut scratch);
            tmp.copy_from(r);
            axpy(&mut tmp, C64::new(dt, 0.0), &k3);
            gen.apply(&tmp, &mut k4, &mut scratch);
            let c = C64::new(dt / 6.0, 0.0);
            axpy(&mut rho.m, c, &k1);
            axpy(&mut rho.m, c * 2.0, &k2);
            axpy(&mut rho.m, c * 2.0, &k3);
            axpy(&mut rho.m, c, &k4);
            hermitize(&mut rho.m);
            stats.steps += 1;
        }
        emit(w[1], &rho, &mut stats)?;
    }
    Ok(stats)
}

/// Collects every emitted density matrix.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    h: Option<&ThreeNodeHamiltonian>,
    gamma: f64,
    t_final: f64,
    cfg: &LindbladConfig,
) -> Result<Vec<(f64, DensityMatrix)>> {
    let mut out = Vec::new();
    lindblad_evolve_observed(rho0, h, gamma, t_final, cfg, &mut |t, r| {
        out.push((t, r.clone()));
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_THIRDS_PI: f64 = 2.0 * PI / 3.0;

    fn cyclic(n_max: usize) -> TruncatedRingSpace {
        TruncatedRingSpace::new(n_max, Boundary::Cyclic).unwrap()
    }

    #[test]
    fn space_enumeration() {
        let s = cyclic(1);
        assert_eq!(s.dim(), 27);
        for i in 0..s.dim() {
            assert_eq!(s.index(s.labels(i)), Some(i));
        }
        assert_eq!(s.index([2, 0, 0]), s.index([-1, 0, 0]));
        let h = TruncatedRingSpace::new(1, Boundary::HardCutoff).unwrap();
        assert_eq!(h.index([2, 0, 0]), None);
        assert!(TruncatedRingSpace::new(8, Boundary::Cyclic).is_err());
        assert!(s.phase_commensurate(TWO_THIRDS_PI));
        assert!(!cyclic(2).phase_commensurate(TWO_THIRDS_PI));
    }

    #[test]
    fn jump_phase_relations() {
        let s = cyclic(4);
        for (p2, p3) in [
            (0.0, 0.0),
            (TWO_THIRDS_PI, -TWO_THIRDS_PI),
            (-TWO_THIRDS_PI, TWO_THIRDS_PI),
        ] {
            let psi = s.plane_wave(1, p2, p3).unwrap();
            let lower = s.plane_wave(0, p2, p3).unwrap();
            for (k, phase) in [(1, 0.0), (2, p2), (3, p3)] {
                let (out, dropped) = jump_action(&s, k, &psi).unwrap();
                assert_eq!(dropped, 0.0);
                let ov = lower.dotc(&out);
                assert!(
                    (ov - C64::from_polar(1.0, -phase)).norm() < 1e-12,
                    "k={k} {ov}"
                );
            }
        }
        assert!(jump_action(&s, 0, &s.plane_wave(0, 0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn hard_cutoff_accounts_dropped_weight() {
        let s = TruncatedRingSpace::new(2, Boundary::HardCutoff).unwrap();
        let psi = s.plane_wave(0, 0.0, 0.0).unwrap();
        for k in 1..=3 {
            let (out, dropped) = jump_action(&s, k, &psi).unwrap();
            assert!(dropped > 0.0);
            assert!((out.norm_squared() + dropped - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chirality_of_plane_waves() {
        let s = cyclic(4);
        for (p2, p3, sign) in [
            (TWO_THIRDS_PI, -TWO_THIRDS_PI, -1.0),
            (-TWO_THIRDS_PI, TWO_THIRDS_PI, 1.0),
            (0.0, 0.0, 0.0),
        ] {
            let rho = DensityMatrix::pure(s, &s.plane_wave(1, p2, p3).unwrap()).unwrap();
            let chi = rho
                .sector_chirality()
                .into_iter()
                .find(|r| r.0 == 1)
                .unwrap();
            assert!(
                (chi.2 - sign * (2.0 * PI / 3.0).sin()).abs() < 1e-12,
                "{chi:?}"
            );
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let s = cyclic(1);
        let p = RingParams::new(1.0, 0.3, 2.0, 0, 0.7).unwrap();
        let h = ThreeNodeHamiltonian::new(s, &p).unwrap();
        let m = h.to_dense();
        assert!((&m - m.adjoint()).camax() < 1e-14);
    }

    #[test]
    fn unitary_limit_keeps_purity() {
        let s = cyclic(1);
        let p = RingParams::new(1.0, 0.2, 1.0, 1, 0.5).unwrap();
        let h = ThreeNodeHamiltonian::new(s, &p).unwrap();
        let rho = DensityMatrix::pure(s, &s.plane_wave(1, 0.3, -1.1).unwrap()).unwrap();
        let cfg = LindbladConfig {
            dt: 1e-3,
            sample_dt: 0.25,
            ..Default::default()
        };
        let out = lindblad_evolve(&rho, Some(&h), 0.0, 2.0, &cfg).unwrap();
        for (_, r) in &out {
            assert!((r.purity() - 1.0).abs() < 1e-8);
            assert!((r.trace() - 1.0).abs() < 1e-10);
        }
        // Compare with exact e^{−iHt}.
        let (t, last) = out.last().unwrap();
        let eig = h.to_dense().symmetric_eigen();
        let u = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * t)))
            * eig.eigenvectors.adjoint();
        let exact = &u * rho.matrix() * u.adjoint();
        assert!((last.matrix() - exact).camax() < 1e-9);
    }

    #[test]
    fn decay_preserves_phase_labels() {
        let s = cyclic(1);
        let rho = DensityMatrix::pure(s, &s.plane_wave(1, TWO_THIRDS_PI, -TWO_THIRDS_PI).unwrap())
            .unwrap();
        let cfg = LindbladConfig {
            dt: 5e-3,
            sample_dt: 0.5,
            ..Default::default()
        };
        let out = lindblad_evolve(&rho, None, 1.0, 30.0, &cfg).unwrap();
        for (_, r) in &out {
            assert!((r.trace() - 1.0).abs() < 1e-10);
            for (_, pop, ov) in r.sector_fidelity(TWO_THIRDS_PI, -TWO_THIRDS_PI).unwrap() {
                assert!(ov >= (1.0 - 1e-6) * pop);
            }
        }
        let last = &out.last().unwrap().1;
        assert!(last.jump_commutator() < 1e-6);
        for (_, pop) in last.sector_populations() {
            assert!((pop - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let s = cyclic(1);
        let p = RingParams::new(1.0, 0.5, 1.0, 1, 0.3).unwrap();
        let h = ThreeNodeHamiltonian::new(s, &p).unwrap();
        let rho = DensityMatrix::pure(s, &s.plane_wave(1, 0.4, 0.9).unwrap()).unwrap();
        let run = |dt: f64| {
            let cfg = LindbladConfig {
                dt,
                sample_dt: 1.0,
                check_positivity: false,
                ..Default::default()
            };
            lindblad_evolve(&rho, Some(&h), 0.5, 1.0, &cfg)
                .unwrap()
                .pop()
                .unwrap()
                .1
        };
        let reference = run(1e-4);
        let e1 = (run(0.1).matrix() - reference.matrix()).camax();
        let e2 = (run(0.05).matrix() - reference.matrix()).camax();
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }
}
