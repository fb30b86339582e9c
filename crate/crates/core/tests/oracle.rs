// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use chiralring::lattice::{Basis, LinearMap, PhaseGrid, WaveFunction};
use chiralring::quench::{
    current_expectation, load_chiral_state, run_quench, QuenchConfig, QuenchModel,
};
use chiralring::ring::{
    build_hamiltonian, build_split_hamiltonian, disorder_diagonality_check,
    flux_fluctuation_energy, flux_fluctuation_numeric, project_physical, RingParams,
};
use chiralring::solver::{
    dense_eigh, dense_lowest, lowest_eigenpairs, lowest_eigenpairs_constrained, propagate,
    to_dense, EigenConfig, PropagatorConfig, PropagatorMethod,
};
use chiralring::C64;
use nalgebra::DMatrix;

fn params(phi_e: f64) -> RingParams {
    RingParams::new(10.0, 1.0, 40.0, 1, phi_e).unwrap()
}

/// Charge-basis matrix written out entry by entry.
fn hand_assembled(p: &RingParams, g: PhaseGrid) -> DMatrix<C64> {
    let n = g.dim();
    let big_n = p.n as f64;
    let a = p.phi_e / 3.0;
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        let (np, nm) = g.labels_at(i);
        let q = np as f64 - 2.0 * big_n / 3.0;
        let kin =
            0.5 * p.e_c * (3.0 * q * q + (nm * nm) as f64) + (p.e_n + p.e_c / 3.0) * big_n * big_n;
        m[(i, i)] += C64::new(kin, 0.0);
        let hops = [
            (1, 1, C64::from_polar(-0.5 * p.e_j, -a)),
            (-1, -1, C64::from_polar(-0.5 * p.e_j, a)),
            (1, -1, C64::from_polar(-0.5 * p.e_j, a)),
            (-1, 1, C64::from_polar(-0.5 * p.e_j, -a)),
            (0, 2, C64::from_polar(-0.5 * p.e_j, a)),
            (0, -2, C64::from_polar(-0.5 * p.e_j, -a)),
        ];
        for (dp, dm, c) in hops {
            let j = g.flat(g.wrap(np + dp), g.wrap(nm + dm));
            m[(j, i)] += c;
        }
    }
    m
}

#[test]
fn matrix_free_matches_hand_assembly() {
    let g = PhaseGrid::new(6).unwrap();
    for phi in [0.0, 0.7, 2.0 * PI] {
        let p = params(phi);
        let h = build_hamiltonian(&p, g).unwrap();
        let d = to_dense(&h).unwrap();
        let r = hand_assembled(&p, g);
        assert!((&d - &r).camax() < 1e-13, "phi_e = {phi}");
        assert!((&d - d.adjoint()).camax() < 1e-13);
    }
}

#[test]
fn spectrum_is_two_pi_periodic() {
    let g = PhaseGrid::new(12).unwrap();
    for phi in [-2.5, 0.3, 1.9] {
        let a = dense_eigh(&to_dense(&build_hamiltonian(&params(phi), g).unwrap()).unwrap()).0;
        let b =
            dense_eigh(&to_dense(&build_hamiltonian(&params(phi + 2.0 * PI), g).unwrap()).unwrap())
                .0;
        let worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }
}

#[test]
fn split_and_charge_builds_agree() {
    let g = PhaseGrid::new(12).unwrap();
    let p = params(1.3);
    let a = dense_eigh(&to_dense(&build_hamiltonian(&p, g).unwrap()).unwrap()).0;
    let b = dense_eigh(&to_dense(&build_split_hamiltonian(&p, g).unwrap()).unwrap()).0;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9 * x.abs().max(1.0));
    }
}

#[test]
fn lanczos_matches_dense() {
    let g = PhaseGrid::new(12).unwrap();
    for phi in [0.0, 1.1, 2.0 * PI] {
        let h = build_hamiltonian(&params(phi), g).unwrap();
        let it = lowest_eigenpairs(&h, 4, &EigenConfig::default()).unwrap();
        let de = dense_lowest(&h, 4).unwrap();
        for k in 0..4 {
            let rel =
                (it.eigenvalues[k] - de.eigenvalues[k]).abs() / de.eigenvalues[k].abs().max(1.0);
            assert!(
                rel < 1e-8,
                "k = {k}: {} vs {}",
                it.eigenvalues[k],
                de.eigenvalues[k]
            );
        }
        let ov = it.eigenvectors[0].overlap(&de.eigenvectors[0]).unwrap();
        assert!((ov - 1.0).abs() < 1e-8);
    }
}

#[test]
fn constrained_lanczos_matches_projected_dense() {
    let g = PhaseGrid::new(12).unwrap();
    let h = build_hamiltonian(&params(2.0 * PI), g).unwrap();
    let m = to_dense(&h).unwrap();
    let keep: Vec<usize> = (0..g.dim())
        .filter(|&i| {
            let (a, b) = g.labels_at(i);
            (a + b).rem_euclid(2) == 0
        })
        .collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);
    let dense = dense_eigh(&sub).0;
    let proj = move |v: &mut [C64]| project_physical(g, Basis::Charge, v);
    let it = lowest_eigenpairs_constrained(&h, 3, &EigenConfig::default(), &proj).unwrap();
    for k in 0..3 {
        assert!((it.eigenvalues[k] - dense[k]).abs() < 1e-8 * dense[k].abs().max(1.0));
    }
}

#[test]
fn propagators_match_dense() {
    let g = PhaseGrid::new(12).unwrap();
    let p = params(0.0);
    let h = build_hamiltonian(&p, g).unwrap();
    let psi0 = WaveFunction::random(g, Basis::Charge, 11);
    let t = 10.0 / p.e_j;
    let reference = propagate(
        &h,
        &psi0,
        t,
        &PropagatorConfig {
            method: PropagatorMethod::DenseOracle,
            dt: 0.1,
            ..Default::default()
        },
    )
    .unwrap();
    for method in [PropagatorMethod::Krylov, PropagatorMethod::Chebyshev] {
        let run = propagate(
            &h,
            &psi0,
            t,
            &PropagatorConfig {
                method,
                dt: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(run.len(), reference.len());
        for ((ta, a), (tb, b)) in run.iter().zip(&reference) {
            assert!((ta - tb).abs() < 1e-12);
            let diff: f64 = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum();
            assert!(
                diff.sqrt() < 1e-8,
                "{method:?} at t = {ta}: {}",
                diff.sqrt()
            );
        }
    }
}

#[test]
fn quench_conserves_energy_and_norm() {
    let g = PhaseGrid::new(24).unwrap();
    let p = RingParams::new(10.0, 0.4, 100.0, 1, 2.0 * PI).unwrap();
    let run = run_quench(&p, g, 2.0, &QuenchConfig::default()).unwrap();
    assert!(
        run.metadata.energy_drift < 1e-9,
        "{}",
        run.metadata.energy_drift
    );
    assert!(run.series.iter().all(|s| (s.norm - 1.0).abs() < 1e-10));
    assert!((run.series[0].current - run.metadata.static_current).abs() < 1e-10);
}

#[test]
fn harmonic_and_full_agree_deep_in_transmon_regime() {
    let g = PhaseGrid::new(36).unwrap();
    let p = RingParams::new(10.0, 1e-3, 100.0, 1, 2.0 * PI).unwrap();
    let cfg = EigenConfig::default();
    let full = load_chiral_state(&p, g, &cfg, QuenchModel::Full).unwrap();
    let harm = load_chiral_state(&p, g, &cfg, QuenchModel::Harmonic).unwrap();
    let a = current_expectation(&full.state, 0.0).unwrap();
    let b = current_expectation(&harm.state, 0.0).unwrap();
    assert!((a - b).abs() < 0.01 * a.abs(), "{a} vs {b}");
    assert!((a - 1.5 * 3f64.sqrt()).abs() < 0.02 * a.abs());
}

#[test]
fn flux_noise_error_is_fourth_order() {
    let g = PhaseGrid::new(12).unwrap();
    let p = params(0.0);
    let cfg = EigenConfig::default();
    let err = |d: f64| {
        flux_fluctuation_numeric(&p, g, d, &cfg).unwrap() - flux_fluctuation_energy(&p, d).unwrap()
    };
    let ratio = err(0.2) / err(0.1);
    assert!((ratio - 16.0).abs() < 0.1, "{ratio}");
    let exact = 3.0 * p.e_j * (1.0 - (0.1f64 / 3.0).cos());
    assert!((flux_fluctuation_numeric(&p, g, 0.1, &cfg).unwrap() - exact).abs() < 1e-9);
}

#[test]
fn disorder_keeps_special_states_uncoupled() {
    let g = PhaseGrid::new(18).unwrap();
    for phi in [0.0, 2.0 * PI] {
        let r = disorder_diagonality_check(g, 1, 10.0, [0.3, -0.2, 0.5], phi).unwrap();
        assert!(r.max_off_diagonal < 1e-12);
        for k in 0..3 {
            assert!((r.diagonal[k] - r.analytic_diagonal[k]).abs() < 1e-12);
        }
    }
    // At zero flux the chiral pair stays degenerate with any disorder.
    let r = disorder_diagonality_check(g, 1, 10.0, [0.3, -0.2, 0.5], 0.0).unwrap();
    assert!((r.diagonal[1] - r.diagonal[2]).abs() < 1e-12);
    // At 2π flux the disorder splits the uniform state from the loaded one.
    let clean = disorder_diagonality_check(g, 1, 10.0, [0.0; 3], 2.0 * PI).unwrap();
    assert!(clean.diagonal[1] < clean.diagonal[0]);
}

#[test]
fn hermitian_operators_are_hermitian() {
    let g = PhaseGrid::new(12).unwrap();
    let h = build_hamiltonian(&params(0.9), g).unwrap();
    assert!(h.is_hermitian());
    assert!(chiralring::lattice::hermiticity_defect(&h, 4, 3) < 1e-12);
}
