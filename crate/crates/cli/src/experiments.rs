// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! One function per experiment kind, each returning a table and a summary.

use std::f64::consts::PI;

use chiralring::effective::{
    circulation, circulation_direction, eigenfrequencies, maxima_order, EffectiveParams,
    SingleExcitationState,
};
use chiralring::lattice::{Basis, LinearMap, PhaseGrid, WaveFunction};
use chiralring::opensys::{
    DensityMatrix, LindbladConfig, ThreeNodeHamiltonian, TruncatedRingSpace,
};
use chiralring::quench::{
    chirality_expectation, continuum_scan, current_expectation, first_minimum, halflife_scan,
    load_chiral_state, oscillation_frequency, peak_after_half_life, run_quench, running_alpha,
    QuenchConfig, QuenchModel, ScanConfig,
};
use chiralring::ring::{
    build_hamiltonian, build_harmonic_hamiltonian, project_physical, special_state, HarmonicParams,
    RingParams, SpecialState,
};
use chiralring::scattering::{
    differential_basis, directionality, resonance_peak, s3_minus_closed_form, smatrix_from_modes,
    smatrix_oriented, InputMode,
};
use chiralring::solver::{
    dense_eigh, dense_lowest, lowest_eigenpairs, lowest_eigenpairs_constrained, propagate,
    to_dense, EigenConfig, PropagatorConfig, PropagatorMethod, DENSE_MAX_DIM,
};
use chiralring::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig, InitialResonatorState};
use crate::error::CliError;
use crate::output::{num, opt_num, Table};

/// Everything an experiment hands back to the runner.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: Table,
    pub summary: Value,
    pub converted: Value,
    pub verify: Option<Value>,
}

pub fn run_experiment(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg, verify),
        Experiment::Quench => quench(cfg, verify),
        Experiment::HalflifeScan => halflife(cfg, verify),
        Experiment::ContinuumScan => continuum(cfg, verify),
        Experiment::Effective => effective(cfg),
        Experiment::Smatrix => smatrix_sweep(cfg, verify),
        Experiment::Lindblad => lindblad(cfg, verify),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn harmonic_period(p: &RingParams) -> f64 {
    2.0 * PI / (12.0 * p.e_j * p.e_c).sqrt()
}

fn ring_json(p: &RingParams) -> Value {
    serde_json::to_value(p).expect("params serialize")
}

/// Lowest `k` physical-sector levels and the ground state.
fn physical_levels(
    p: &RingParams,
    grid: PhaseGrid,
    k: usize,
    eigen: &EigenConfig,
) -> Result<(Vec<f64>, WaveFunction, f64), CliError> {
    let h = build_hamiltonian(p, grid)?;
    let proj = move |v: &mut [C64]| project_physical(grid, Basis::Charge, v);
    let r = lowest_eigenpairs_constrained(&h, k, eigen, &proj)?;
    let worst = r.residuals.iter().copied().fold(0.0, f64::max);
    let psi = r.eigenvectors.into_iter().next().expect("k >= 1");
    Ok((r.eigenvalues, psi, worst))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Constrained Lanczos against dense diagonalization of the physical block.
fn dense_level_check(
    p: &RingParams,
    grid: PhaseGrid,
    k: usize,
    eigen: &EigenConfig,
) -> Result<f64, CliError> {
    let h = build_hamiltonian(p, grid)?;
    let m = to_dense(&h)?;
    let keep: Vec<usize> = (0..grid.dim())
        .filter(|&i| {
            let (a, b) = grid.labels_at(i);
            (a + b).rem_euclid(2) == 0
        })
        .collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);
    let dense = dense_eigh(&sub).0;
    let (it, _, _) = physical_levels(p, grid, k, eigen)?;
    Ok(it
        .iter()
        .zip(&dense)
        .map(|(a, b)| relative(*a, *b))
        .fold(0.0, f64::max))
}

/// Unconstrained Lanczos against the dense spectrum of any grid operator.
fn dense_map_check(h: &dyn LinearMap, k: usize, eigen: &EigenConfig) -> Result<f64, CliError> {
    let it = lowest_eigenpairs(h, k, eigen)?;
    let de = dense_lowest(h, k)?;
    Ok(it
        .eigenvalues
        .iter()
        .zip(&de.eigenvalues)
        .map(|(a, b)| relative(*a, *b))
        .fold(0.0, f64::max))
}

/// Largest state difference between `prop` and the dense exponential.
fn dense_propagation_check(
    h: &dyn LinearMap,
    t: f64,
    prop: &PropagatorConfig,
    seed: u64,
) -> Result<f64, CliError> {
    let psi0 = WaveFunction::random(h.grid(), h.basis(), seed);
    let cfg = PropagatorConfig {
        dt: t / 10.0,
        ..prop.clone()
    };
    let oracle = PropagatorConfig {
        method: PropagatorMethod::DenseOracle,
        ..cfg.clone()
    };
    let a = propagate(h, &psi0, t, &cfg)?;
    let b = propagate(h, &psi0, t, &oracle)?;
    let mut worst = 0.0_f64;
    for ((_, x), (_, y)) in a.iter().zip(&b) {
        let d: f64 = x
            .amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(u, v)| (u - v).norm_sqr())
            .sum();
        worst = worst.max(d.sqrt());
    }
    Ok(worst)
}

fn skipped(grid: PhaseGrid) -> Value {
    json!({
        "skipped": format!("dimension {} exceeds the dense limit {DENSE_MAX_DIM}", grid.dim())
    })
}

/// Ground-branch class from ⟨χ⟩: −1, 0 or +1.
fn branch_class(chi: f64, scale: f64) -> i32 {
    if scale <= 0.0 || chi.abs() < 0.5 * scale {
        0
    } else if chi > 0.0 {
        1
    } else {
        -1
    }
}

fn spectrum(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    let base = cfg.ring_params()?;
    let grid = cfg.grid()?;
    let s = &cfg.spectrum;
    let ratios = if s.ratios.is_empty() {
        vec![base.ratio()]
    } else {
        s.ratios.clone()
    };
    let phis = linspace(s.phi_min, s.phi_max, s.points);
    let jobs: Vec<(usize, usize)> = (0..ratios.len())
        .flat_map(|r| (0..phis.len()).map(move |i| (r, i)))
        .collect();

    struct Point {
        levels: Vec<f64>,
        current: f64,
        current_zero_flux: f64,
        chirality: f64,
        residual: f64,
    }
    let points: Vec<Point> = jobs
        .par_iter()
        .map(|&(r, i)| {
            let p = RingParams {
                e_c: base.e_j / ratios[r],
                phi_e: phis[i],
                ..base.clone()
            };
            let (levels, psi, residual) = physical_levels(&p, grid, s.levels, &cfg.eigen)?;
            Ok(Point {
                levels,
                current: current_expectation(&psi, p.phi_e)?,
                current_zero_flux: current_expectation(&psi, 0.0)?,
                chirality: chirality_expectation(&psi, p.n)?,
                residual,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut header = vec!["ratio".to_string(), "phi_e".to_string()];
    header.extend((0..s.levels).map(|k| format!("e{k}")));
    header.extend(["I_ch", "I_ch_zero_flux", "chirality"].map(String::from));
    let mut table = Table::new(header);
    for (&(r, i), pt) in jobs.iter().zip(&points) {
        let mut row = vec![num(ratios[r]), num(phis[i])];
        row.extend(pt.levels.iter().map(|&e| num(e)));
        row.push(num(pt.current));
        row.push(num(pt.current_zero_flux));
        row.push(num(pt.chirality));
        table.push(row);
    }

    let step = (s.phi_max - s.phi_min) / (s.points - 1) as f64;
    let shift = 2.0 * PI / step;
    let shift_idx = (shift.round() - shift).abs() < 1e-9;
    let mut per_ratio = Vec::new();
    for (r, &ratio) in ratios.iter().enumerate() {
        let pts = &points[r * phis.len()..(r + 1) * phis.len()];
        let periodicity = if shift_idx && (shift.round() as usize) < phis.len() {
            let d = shift.round() as usize;
            let dev = (0..phis.len() - d)
                .flat_map(|i| {
                    pts[i]
                        .levels
                        .iter()
                        .zip(&pts[i + d].levels)
                        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                })
                .fold(0.0, f64::max);
            Some(dev)
        } else {
            None
        };
        let scale = pts.iter().map(|p| p.chirality.abs()).fold(0.0, f64::max);
        let classes: Vec<i32> = pts
            .iter()
            .map(|p| branch_class(p.chirality, scale))
            .collect();
        let crossings: Vec<f64> = classes
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(i, _)| 0.5 * (phis[i] + phis[i + 1]))
            .collect();
        let mean_current = |c: i32| {
            let v: Vec<f64> = pts
                .iter()
                .zip(&classes)
                .filter(|(_, k)| **k == c)
                .map(|(p, _)| p.current_zero_flux)
                .collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        per_ratio.push(json!({
            "ratio": ratio,
            "periodicity_relative_deviation": periodicity,
            "crossings": crossings,
            "current_plus_branch": mean_current(1),
            "current_minus_branch": mean_current(-1),
            "current_uniform_branch": mean_current(0),
            "max_residual": pts.iter().map(|p| p.residual).fold(0.0, f64::max),
        }));
    }
    let summary = json!({ "step": step, "ratios": per_ratio });

    let verify = if verify {
        Some(if grid.dim() <= DENSE_MAX_DIM {
            let mut checks = Vec::new();
            for &ratio in &ratios {
                let mut worst = 0.0_f64;
                for phi in [phis[0], 0.5 * (phis[0] + phis[phis.len() - 1]), PI / 3.0] {
                    let p = RingParams {
                        e_c: base.e_j / ratio,
                        phi_e: phi,
                        ..base.clone()
                    };
                    worst = worst.max(dense_level_check(&p, grid, s.levels, &cfg.eigen)?);
                }
                checks.push(json!({ "ratio": ratio, "max_relative_eigenvalue_error": worst }));
            }
            json!({ "eigenvalues": checks })
        } else {
            skipped(grid)
        })
    } else {
        None
    };
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "ring": ring_json(&base), "ratios": ratios }),
        verify,
    })
}

fn quench_config(
    cfg: &ExperimentConfig,
    model: QuenchModel,
    sample_dt: Option<f64>,
) -> QuenchConfig {
    QuenchConfig {
        model,
        sample_dt,
        eigen: cfg.eigen.clone(),
        propagator: cfg.propagator.clone(),
    }
}

/// Dense cross-checks of the loading and post-quench operators.
fn ring_verify(
    p: &RingParams,
    grid: PhaseGrid,
    model: QuenchModel,
    cfg: &ExperimentConfig,
) -> Result<Value, CliError> {
    if grid.dim() > DENSE_MAX_DIM {
        return Ok(skipped(grid));
    }
    let t = 10.0 * chiralring::quench::sample_interval(p)?;
    let after = p.with_flux(0.0);
    let (eig, prop) = match model {
        QuenchModel::Full => (
            dense_level_check(p, grid, 3, &cfg.eigen)?,
            dense_propagation_check(
                &build_hamiltonian(&after, grid)?,
                t,
                &cfg.propagator,
                cfg.eigen.seed,
            )?,
        ),
        QuenchModel::Harmonic => (
            dense_map_check(&build_harmonic_hamiltonian(p, grid)?, 3, &cfg.eigen)?,
            dense_propagation_check(
                &build_harmonic_hamiltonian(&after, grid)?,
                t,
                &cfg.propagator,
                cfg.eigen.seed,
            )?,
        ),
    };
    Ok(json!({
        "l": grid.len(),
        "max_relative_eigenvalue_error": eig,
        "max_state_error": prop,
        "propagation_time": t,
    }))
}

fn quench(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    let p = cfg.ring_params()?;
    let grid = cfg.grid()?;
    let q = &cfg.quench;
    let period = harmonic_period(&p);
    let t_final = q.t_final.unwrap_or(q.periods * period);
    let qc = quench_config(cfg, q.model, q.sample_dt);
    let run = run_quench(&p, grid, t_final, &qc)?;
    let loaded = load_chiral_state(&p, grid, &cfg.eigen, q.model)?;
    let overlaps: Vec<Value> = SpecialState::ALL
        .iter()
        .map(|&s| {
            let o = special_state(grid, s).overlap(&loaded.state)?;
            Ok(json!({ "state": s.label(), "overlap": o }))
        })
        .collect::<Result<_, CliError>>()?;

    let i0 = run.series[0].current;
    let mut table = Table::new(["t_ns", "I_ch", "I_ch_relative", "norm", "energy"]);
    for s in &run.series {
        table.push_f64(&[s.t, s.current, s.current / i0, s.norm, s.energy]);
    }
    let series = run.current_series();
    let min_rel = series
        .iter()
        .map(|x| x.1 / i0)
        .fold(f64::INFINITY, f64::min);
    let summary = json!({
        "t_final": t_final,
        "harmonic_period": period,
        "harmonic_frequency": (12.0 * p.e_j * p.e_c).sqrt(),
        "mode_frequency": HarmonicParams::mode_frequency(&p),
        "tau": run.tau,
        "initial_current": i0,
        "max_relative_drop": 1.0 - min_rel,
        "first_minimum": first_minimum(&series),
        "oscillation_frequency": oscillation_frequency(&series),
        "peak_after_half_life": peak_after_half_life(&series),
        "special_state_overlaps": overlaps,
        "metadata": run.metadata,
    });
    let verify = verify
        .then(|| ring_verify(&p, grid, q.model, cfg))
        .transpose()?;
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "ring": ring_json(&p) }),
        verify,
    })
}

fn halflife(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    let base = cfg.ring_params()?;
    let h = &cfg.halflife_scan;
    let sc = ScanConfig {
        ladder: h.ladder.clone(),
        tol: h.tol,
        periods: h.periods,
        max_extensions: h.max_extensions,
        quench: quench_config(cfg, h.model, None),
    };
    let scan = halflife_scan(&base, &h.ratios, &sc)?;
    let running = running_alpha(
        &scan
            .points
            .iter()
            .map(|p| (p.ratio, p.tau))
            .collect::<Vec<_>>(),
    );
    let mut table = Table::new([
        "ratio",
        "L_star",
        "tau_ns",
        "alpha_running",
        "e_c",
        "t_final_ns",
    ]);
    for (pt, a) in scan.points.iter().zip(&running) {
        table.push(vec![
            num(pt.ratio),
            pt.l_star.map(|l| l.to_string()).unwrap_or_default(),
            num(pt.tau),
            opt_num(*a),
            num(pt.e_c),
            num(pt.t_final),
        ]);
    }
    let points: Vec<Value> = scan
        .points
        .iter()
        .map(|pt| {
            json!({
                "ratio": pt.ratio,
                "tau": pt.tau,
                "l_star": pt.l_star,
                "converged": pt.report.converged(),
                "steps": pt.report.steps,
            })
        })
        .collect();
    let summary = json!({
        "alpha": scan.fit.alpha,
        "alpha_stderr": scan.fit.alpha_stderr,
        "tau0": scan.fit.tau0,
        "tau0_stderr": scan.fit.tau0_stderr,
        "fit": scan.fit,
        "all_converged": scan.points.iter().all(|p| p.report.converged()),
        "points": points,
    });
    let verify = if verify {
        // The smallest rung of the ladder at the first ratio.
        let l = h.ladder[0];
        let grid = PhaseGrid::new(l)?;
        let p = RingParams {
            e_c: base.e_j / h.ratios[0],
            ..base.clone()
        };
        Some(ring_verify(&p, grid, h.model, cfg)?)
    } else {
        None
    };
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "ring": ring_json(&base) }),
        verify,
    })
}

fn continuum(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    let p = cfg.ring_params()?;
    let c = &cfg.continuum_scan;
    let t_final = c.t_final.unwrap_or(c.periods * harmonic_period(&p));
    let qc = quench_config(cfg, c.model, None);
    let rep = continuum_scan(&p, &c.ladder, t_final, &qc, c.tol)?;
    let mut table = Table::new(["L", "deviation", "tau_ns"]);
    for s in &rep.steps {
        table.push(vec![s.l.to_string(), opt_num(s.deviation), opt_num(s.tau)]);
    }
    let summary = json!({
        "t_final": t_final,
        "tol": rep.tol,
        "l_star": rep.l_star,
        "converged": rep.converged(),
        "tau": rep.run.tau,
        "initial_current": rep.run.series[0].current,
    });
    let verify = if verify {
        Some(ring_verify(&p, PhaseGrid::new(c.ladder[0])?, c.model, cfg)?)
    } else {
        None
    };
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "ring": ring_json(&p) }),
        verify,
    })
}

fn initial_state(which: InitialResonatorState) -> SingleExcitationState {
    match which {
        InitialResonatorState::SiteA => SingleExcitationState::site(0),
        InitialResonatorState::SiteB => SingleExcitationState::site(1),
        InitialResonatorState::SiteC => SingleExcitationState::site(2),
        InitialResonatorState::SymmetricAb => SingleExcitationState::symmetric_ab(),
        InitialResonatorState::AntisymmetricAb => SingleExcitationState::antisymmetric_ab(),
    }
}

fn effective(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = cfg.effective_params()?;
    let e = &cfg.effective;
    let psi = initial_state(e.initial);
    let t_final = e.t_final.unwrap_or(2.0 * p.period());
    let ts = linspace(0.0, t_final, e.points);
    let rows = circulation(&p, &psi, &ts)?;
    let flipped = circulation(&p.flipped(), &psi, &ts)?;
    let mut table = Table::new(["t", "p_a", "p_b", "p_c", "total"]);
    for r in &rows {
        table.push_f64(&[r[0], r[1], r[2], r[3], r[1] + r[2] + r[3]]);
    }
    let order = maxima_order(&rows);
    let order_flipped = maxima_order(&flipped);
    let summary = json!({
        "eigenfrequencies": eigenfrequencies(&p),
        "period": p.period(),
        "maxima_order": order,
        "direction": circulation_direction(&order),
        "direction_flipped": circulation_direction(&order_flipped),
        "max_probability_error": rows.iter().map(|r| (r[1] + r[2] + r[3] - 1.0).abs()).fold(0.0, f64::max),
        "max_bc_imbalance": rows.iter().map(|r| (r[2] - r[3]).abs()).fold(0.0, f64::max),
    });
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "omega_r": p.omega_r, "g": p.g, "chirality_sign": p.chirality_sign }),
        verify: None,
    })
}

fn smatrix_sweep(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    let sc = cfg.scale();
    let s = &cfg.smatrix;
    let p = EffectiveParams::new(s.omega_r * sc, s.g * sc, s.chirality_sign)?;
    let gamma = s.gamma * sc;
    let lo = s
        .omega_min
        .map(|w| w * sc)
        .unwrap_or(p.omega_r - 2.0 * p.g - 5.0 * gamma);
    let hi = s
        .omega_max
        .map(|w| w * sc)
        .unwrap_or(p.omega_r + 7.0 * p.g + 5.0 * gamma);
    let omegas = linspace(lo, hi, s.points);
    let col = match s.input {
        InputMode::Plus => 0,
        InputMode::Minus => 1,
    };
    let mut header: Vec<String> = [
        "omega",
        "p1",
        "p2",
        "p3",
        "s3_minus_closed_form",
        "unitarity_residual",
    ]
    .map(String::from)
    .to_vec();
    if s.full_dump {
        for i in 1..=3 {
            for j in 1..=3 {
                header.push(format!("s{i}{j}_re"));
                header.push(format!("s{i}{j}_im"));
            }
        }
    }
    let mut table = Table::new(header);
    let (mut worst_unitarity, mut worst_closed, mut worst_phase) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut worst_modes = 0.0_f64;
    let target = if p.chirality_sign > 0 {
        4.0 * PI / 3.0
    } else {
        2.0 * PI / 3.0
    };
    for &w in &omegas {
        let m = smatrix_oriented(w, &p, gamma)?;
        let st = differential_basis(&m);
        let closed = s3_minus_closed_form(w, p.omega_r, p.g, gamma);
        let res = m.unitarity_residual();
        worst_unitarity = worst_unitarity.max(res);
        worst_closed = worst_closed.max((st[(2, 1)].norm_sqr() - closed).abs());
        if m.entries[(0, 1)].norm() > 1e-12 {
            let d = (m.entries[(0, 1)].arg() - m.entries[(1, 0)].arg()).rem_euclid(2.0 * PI);
            let off = (d - target).abs().min(2.0 * PI - (d - target).abs());
            worst_phase = worst_phase.max(off);
        }
        if verify {
            let modes = smatrix_from_modes(w, &p, gamma)?;
            worst_modes = worst_modes.max((modes.entries - m.entries).camax());
        }
        let mut row = vec![
            num(w),
            num(st[(0, col)].norm_sqr()),
            num(st[(1, col)].norm_sqr()),
            num(st[(2, col)].norm_sqr()),
            num(closed),
            num(res),
        ];
        if s.full_dump {
            for i in 0..3 {
                for j in 0..3 {
                    row.push(num(m.entries[(i, j)].re));
                    row.push(num(m.entries[(i, j)].im));
                }
            }
        }
        table.push(row);
    }
    let dir = directionality(p.omega_r, p.g, gamma)?;
    let summary = json!({
        "max_unitarity_residual": worst_unitarity,
        "max_closed_form_error": worst_closed,
        "phase_difference_target": target,
        "max_phase_difference_error": worst_phase,
        "directionality": dir,
        "resonance_peak": resonance_peak(p.g, gamma),
        "small_gamma_limit": 2.0 / 3.0,
    });
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "omega_r": p.omega_r, "g": p.g, "gamma": gamma, "omega_min": lo, "omega_max": hi }),
        verify: verify.then(|| json!({ "max_mode_sum_difference": worst_modes })),
    })
}

fn lindblad(cfg: &ExperimentConfig, verify: bool) -> Result<Outcome, CliError> {
    let sc = cfg.scale();
    let l = &cfg.lindblad;
    let space = TruncatedRingSpace::new(l.n_max, l.boundary)?;
    let ham = if l.with_hamiltonian {
        Some(ThreeNodeHamiltonian::new(space, &cfg.ring_params()?)?)
    } else {
        None
    };
    let psi = space.plane_wave(l.sector, l.phi2, l.phi3)?;
    let rho0 = DensityMatrix::pure(space, &psi)?;
    let sector = space.reduce_sector(l.sector);
    let lc = LindbladConfig {
        dt: l.dt,
        sample_dt: l.sample_dt,
        ..LindbladConfig::default()
    };
    let gammas: Vec<f64> = l.gammas.iter().map(|g| g * sc).collect();

    type Row = [f64; 7];
    let runs: Vec<(Vec<Row>, chiralring::opensys::LindbladStats, f64)> = gammas
        .par_iter()
        .map(|&gamma| {
            let mut rows = Vec::new();
            let mut worst_commutator = 0.0_f64;
            let stats = chiralring::opensys::lindblad_evolve_observed(
                &rho0,
                ham.as_ref(),
                gamma,
                l.t_final,
                &lc,
                &mut |t, rho| {
                    let fid = rho.sector_fidelity(l.phi2, l.phi3)?;
                    let (pop, ov) = fid
                        .iter()
                        .find(|x| x.0 == sector)
                        .map(|x| (x.1, x.2))
                        .unwrap_or((0.0, 0.0));
                    let chi = rho
                        .sector_chirality()
                        .into_iter()
                        .find(|x| x.0 == sector)
                        .map(|x| x.2)
                        .unwrap_or(0.0);
                    if verify {
                        worst_commutator = worst_commutator.max(rho.jump_commutator());
                    }
                    rows.push([gamma, t, rho.trace(), rho.purity(), pop, ov, chi]);
                    Ok(())
                },
            )?;
            Ok((rows, stats, worst_commutator))
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new([
        "gamma",
        "t",
        "trace",
        "purity",
        "sector_population",
        "sector_overlap",
        "sector_chirality",
    ]);
    let mut per_gamma = Vec::new();
    let mut verify_rows = Vec::new();
    for (gamma, (rows, stats, comm)) in gammas.iter().zip(&runs) {
        for r in rows {
            table.push_f64(r);
        }
        let worst_trace = rows.iter().map(|r| (r[2] - 1.0).abs()).fold(0.0, f64::max);
        let worst_label = rows
            .iter()
            .filter(|r| r[4] > 0.0)
            .map(|r| 1.0 - r[5] / r[4])
            .fold(0.0, f64::max);
        let last = rows.last().expect("at least the initial sample");
        per_gamma.push(json!({
            "gamma": gamma,
            "max_trace_error": worst_trace,
            "max_sector_label_loss": worst_label,
            "final_sector_population": last[4],
            "final_sector_chirality": last[6],
            "final_purity": last[3],
            "stats": stats,
        }));
        verify_rows.push(json!({ "gamma": gamma, "max_jump_commutator": comm }));
    }
    let summary = json!({
        "dim": space.dim(),
        "sector": sector,
        "runs": per_gamma,
    });
    Ok(Outcome {
        table,
        summary,
        converted: json!({ "gammas": gammas, "with_hamiltonian": l.with_hamiltonian }),
        verify: verify.then(|| json!({ "runs": verify_rows })),
    })
}
