// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! TOML experiment description.
//!
//! Energies and rates are entered in GHz and times in ns. Under the default
//! `angular` convention a GHz figure is used directly as rad/ns; `cyclic`
//! multiplies by 2π first.

use std::f64::consts::PI;
use std::path::Path;

use chiralring::effective::CouplingForm;
use chiralring::lattice::PhaseGrid;
use chiralring::opensys::Boundary;
use chiralring::quench::QuenchModel;
use chiralring::ring::RingParams;
use chiralring::scattering::InputMode;
use chiralring::solver::{EigenConfig, PropagatorConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    Quench,
    HalflifeScan,
    Effective,
    Smatrix,
    Lindblad,
    ContinuumScan,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Quench => "quench",
            Experiment::HalflifeScan => "halflife-scan",
            Experiment::Effective => "effective",
            Experiment::Smatrix => "smatrix",
            Experiment::Lindblad => "lindblad",
            Experiment::ContinuumScan => "continuum-scan",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyConvention {
    /// 1 GHz ↦ 1 rad/ns.
    #[default]
    Angular,
    /// 1 GHz ↦ 2π rad/ns.
    Cyclic,
}

impl EnergyConvention {
    pub fn factor(self) -> f64 {
        match self {
            EnergyConvention::Angular => 1.0,
            EnergyConvention::Cyclic => 2.0 * PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingSection {
    /// GHz.
    pub e_j: f64,
    /// GHz.
    pub e_c: f64,
    /// GHz.
    pub e_n: f64,
    pub n: i64,
    /// Radians; the loading flux for quench experiments.
    pub phi_e: f64,
    /// Per-junction offsets in GHz.
    pub disorder: Option<[f64; 3]>,
}

impl Default for RingSection {
    fn default() -> Self {
        Self {
            e_j: 10.0,
            e_c: 0.1,
            e_n: 100.0,
            n: 1,
            phi_e: 2.0 * PI,
            disorder: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub l: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { l: 48 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub phi_min: f64,
    pub phi_max: f64,
    pub points: usize,
    /// E_J/E_C values; `[ring].e_c` is used when empty.
    pub ratios: Vec<f64>,
    pub levels: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            phi_min: -3.0 * PI,
            phi_max: 3.0 * PI,
            points: 121,
            ratios: vec![10.0, 100.0, 1e5],
            levels: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchSection {
    pub model: QuenchModel,
    /// ns; overrides `periods` when set.
    pub t_final: Option<f64>,
    /// Window in harmonic periods 2π/√(12 E_J E_C).
    pub periods: f64,
    /// ns; defaults to a fortieth of the harmonic period.
    pub sample_dt: Option<f64>,
}

impl Default for QuenchSection {
    fn default() -> Self {
        Self {
            model: QuenchModel::Full,
            t_final: None,
            periods: 3.0,
            sample_dt: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HalflifeScanSection {
    pub ratios: Vec<f64>,
    pub ladder: Vec<usize>,
    pub tol: f64,
    pub periods: f64,
    pub max_extensions: usize,
    pub model: QuenchModel,
}

impl Default for HalflifeScanSection {
    fn default() -> Self {
        let scan = chiralring::quench::ScanConfig::default();
        Self {
            ratios: vec![25.0, 50.0, 100.0, 200.0, 400.0],
            ladder: scan.ladder,
            tol: scan.tol,
            periods: scan.periods,
            max_extensions: scan.max_extensions,
            model: QuenchModel::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuumScanSection {
    pub ladder: Vec<usize>,
    pub tol: f64,
    pub periods: f64,
    /// ns; overrides `periods` when set.
    pub t_final: Option<f64>,
    pub model: QuenchModel,
}

impl Default for ContinuumScanSection {
    fn default() -> Self {
        Self {
            ladder: vec![24, 36, 48, 60, 72, 90],
            tol: 1e-3,
            periods: 1.5,
            t_final: None,
            model: QuenchModel::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialResonatorState {
    SiteA,
    SiteB,
    SiteC,
    SymmetricAb,
    AntisymmetricAb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    /// GHz.
    pub e_j_r: f64,
    /// GHz.
    pub e_n: f64,
    pub n: i64,
    #[serde(default = "default_form")]
    pub form: CouplingForm,
}

fn default_form() -> CouplingForm {
    CouplingForm::Full
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EffectiveSection {
    /// GHz.
    pub omega_r: f64,
    /// GHz; mutually exclusive with `coupling`.
    pub g: Option<f64>,
    /// Derives g from the ring when present.
    pub coupling: Option<CouplingSection>,
    pub chirality_sign: i8,
    pub initial: InitialResonatorState,
    /// ns; defaults to two recurrence periods.
    pub t_final: Option<f64>,
    pub points: usize,
}

impl Default for EffectiveSection {
    fn default() -> Self {
        Self {
            omega_r: 1.0,
            g: None,
            coupling: None,
            chirality_sign: 1,
            initial: InitialResonatorState::AntisymmetricAb,
            t_final: None,
            points: 401,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmatrixSection {
    /// GHz.
    pub omega_r: f64,
    /// GHz.
    pub g: f64,
    /// GHz.
    pub gamma: f64,
    pub chirality_sign: i8,
    pub input: InputMode,
    pub points: usize,
    /// GHz; both bounds default to the standard window around the poles.
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    /// Appends the 18 real columns of S.
    pub full_dump: bool,
}

impl Default for SmatrixSection {
    fn default() -> Self {
        Self {
            omega_r: 1.0,
            g: 0.5,
            gamma: 0.35,
            chirality_sign: 1,
            input: InputMode::Minus,
            points: 2001,
            omega_min: None,
            omega_max: None,
            full_dump: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindbladSection {
    pub n_max: usize,
    pub boundary: Boundary,
    /// GHz; each value is an independent run.
    pub gammas: Vec<f64>,
    /// ns.
    pub t_final: f64,
    /// ns.
    pub dt: f64,
    /// ns.
    pub sample_dt: f64,
    /// Initial |N, φ₂, φ₃⟩.
    pub sector: i64,
    pub phi2: f64,
    pub phi3: f64,
    /// Includes the ring Hamiltonian built from `[ring]` at `phi_e`.
    pub with_hamiltonian: bool,
}

impl Default for LindbladSection {
    fn default() -> Self {
        Self {
            n_max: 4,
            boundary: Boundary::Cyclic,
            gammas: vec![1.0],
            t_final: 2.0,
            dt: 0.01,
            sample_dt: 0.1,
            sector: 1,
            phi2: 2.0 * PI / 3.0,
            phi3: -2.0 * PI / 3.0,
            with_hamiltonian: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Artifact root; `--out` takes precedence.
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub energy_convention: EnergyConvention,
    #[serde(default)]
    pub ring: RingSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub eigen: EigenConfig,
    #[serde(default)]
    pub propagator: PropagatorConfig,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub quench: QuenchSection,
    #[serde(default)]
    pub halflife_scan: HalflifeScanSection,
    #[serde(default)]
    pub continuum_scan: ContinuumScanSection,
    #[serde(default)]
    pub effective: EffectiveSection,
    #[serde(default)]
    pub smatrix: SmatrixSection,
    #[serde(default)]
    pub lindblad: LindbladSection,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn default_for(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: None,
            out: None,
            energy_convention: EnergyConvention::default(),
            ring: RingSection::default(),
            grid: GridSection::default(),
            eigen: EigenConfig::default(),
            propagator: PropagatorConfig::default(),
            spectrum: SpectrumSection::default(),
            quench: QuenchSection::default(),
            halflife_scan: HalflifeScanSection::default(),
            continuum_scan: ContinuumScanSection::default(),
            effective: EffectiveSection::default(),
            smatrix: SmatrixSection::default(),
            lindblad: LindbladSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Applies a command-line seed; the solver seed follows it.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if seed.is_some() {
            self.seed = seed;
        }
        if let Some(s) = self.seed {
            self.eigen.seed = s;
        }
        self
    }

    /// Energy scale in rad/ns per GHz.
    pub fn scale(&self) -> f64 {
        self.energy_convention.factor()
    }

    /// Ring parameters in rad/ns.
    pub fn ring_params(&self) -> Result<RingParams, CliError> {
        let s = self.scale();
        let r = &self.ring;
        let p = RingParams {
            e_j: r.e_j * s,
            e_c: r.e_c * s,
            e_n: r.e_n * s,
            n: r.n,
            phi_e: r.phi_e,
            disorder: r.disorder.map(|d| d.map(|x| x * s)),
        };
        p.validate().map_err(config_err)?;
        Ok(p)
    }

    pub fn grid(&self) -> Result<PhaseGrid, CliError> {
        PhaseGrid::new(self.grid.l).map_err(config_err)
    }

    /// SHA-256 of the canonical JSON form, first 16 hex digits. The output
    /// location does not enter.
    pub fn hash(&self) -> String {
        let keyed = Self {
            out: None,
            ..self.clone()
        };
        let canonical = serde_json::to_string(&keyed).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Checks every section the selected experiment reads.
    pub fn validate(&self) -> Result<(), CliError> {
        self.propagator.validate().map_err(config_err)?;
        if !(self.eigen.tol > 0.0) || self.eigen.max_basis < 2 {
            return Err(config_err("eigen: tol must be positive and max_basis >= 2"));
        }
        let ratios_ok = |r: &[f64], name: &str| -> Result<(), CliError> {
            if r.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(config_err(format!("{name}: ratios must be positive")));
            }
            Ok(())
        };
        let ladder_ok = |l: &[usize], name: &str| -> Result<(), CliError> {
            if l.len() < 2 || !l.windows(2).all(|w| w[0] < w[1]) {
                return Err(config_err(format!(
                    "{name}: ladder needs at least two increasing sizes"
                )));
            }
            for &x in l {
                PhaseGrid::new(x).map_err(|e| config_err(format!("{name}: {e}")))?;
            }
            Ok(())
        };
        match self.experiment {
            Experiment::Spectrum => {
                self.ring_params()?;
                self.grid()?;
                let s = &self.spectrum;
                if s.points < 2 || !(s.phi_max > s.phi_min) || s.levels == 0 {
                    return Err(config_err(
                        "spectrum: need points >= 2, phi_max > phi_min, levels >= 1",
                    ));
                }
                ratios_ok(&s.ratios, "spectrum")?;
            }
            Experiment::Quench => {
                let p = self.ring_params()?;
                self.grid()?;
                if !(p.e_c > 0.0) {
                    return Err(config_err("quench: e_c must be positive"));
                }
                let q = &self.quench;
                if q.t_final.is_some_and(|t| !(t > 0.0)) || !(q.periods > 0.0) {
                    return Err(config_err("quench: window must be positive"));
                }
                if q.sample_dt.is_some_and(|t| !(t > 0.0)) {
                    return Err(config_err("quench: sample_dt must be positive"));
                }
            }
            Experiment::HalflifeScan => {
                self.ring_params()?;
                let h = &self.halflife_scan;
                ratios_ok(&h.ratios, "halflife_scan")?;
                if h.ratios.len() < 3 {
                    return Err(config_err(
                        "halflife_scan: need at least three ratios for the fit",
                    ));
                }
                ladder_ok(&h.ladder, "halflife_scan")?;
                if !(h.tol > 0.0 && h.periods > 0.0) {
                    return Err(config_err(
                        "halflife_scan: tol and periods must be positive",
                    ));
                }
            }
            Experiment::ContinuumScan => {
                let p = self.ring_params()?;
                if !(p.e_c > 0.0) {
                    return Err(config_err("continuum_scan: e_c must be positive"));
                }
                let c = &self.continuum_scan;
                ladder_ok(&c.ladder, "continuum_scan")?;
                if !(c.tol > 0.0 && c.periods > 0.0) || c.t_final.is_some_and(|t| !(t > 0.0)) {
                    return Err(config_err(
                        "continuum_scan: tol and window must be positive",
                    ));
                }
            }
            Experiment::Effective => {
                let e = &self.effective;
                if e.g.is_some() && e.coupling.is_some() {
                    return Err(config_err(
                        "effective: give either g or [effective.coupling], not both",
                    ));
                }
                if e.points < 2 || e.t_final.is_some_and(|t| !(t > 0.0)) {
                    return Err(config_err(
                        "effective: need points >= 2 and a positive window",
                    ));
                }
                self.effective_params()?;
            }
            Experiment::Smatrix => {
                let s = &self.smatrix;
                chiralring::effective::EffectiveParams::new(
                    s.omega_r * self.scale(),
                    s.g * self.scale(),
                    s.chirality_sign,
                )
                .map_err(config_err)?;
                if !(s.gamma > 0.0) || s.points < 2 {
                    return Err(config_err(
                        "smatrix: gamma must be positive and points >= 2",
                    ));
                }
                if let (Some(a), Some(b)) = (s.omega_min, s.omega_max) {
                    if !(b > a) {
                        return Err(config_err("smatrix: omega_max must exceed omega_min"));
                    }
                }
            }
            Experiment::Lindblad => {
                let l = &self.lindblad;
                chiralring::opensys::TruncatedRingSpace::new(l.n_max, l.boundary)
                    .map_err(config_err)?;
                if l.gammas.is_empty() || l.gammas.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                    return Err(config_err(
                        "lindblad: gammas must be non-negative and non-empty",
                    ));
                }
                if !(l.dt > 0.0 && l.sample_dt >= l.dt && l.t_final >= 0.0) {
                    return Err(config_err(
                        "lindblad: need 0 < dt <= sample_dt and t_final >= 0",
                    ));
                }
                if l.with_hamiltonian {
                    self.ring_params()?;
                }
            }
        }
        Ok(())
    }

    /// Effective-model parameters in rad/ns.
    pub fn effective_params(&self) -> Result<chiralring::effective::EffectiveParams, CliError> {
        let s = self.scale();
        let e = &self.effective;
        let omega_r = e.omega_r * s;
        let g = match (&e.coupling, e.g) {
            (Some(c), _) => {
                chiralring::effective::coupling_g(c.e_j_r * s, c.e_n * s, omega_r, c.n, c.form)
                    .map_err(config_err)?
            }
            (None, Some(g)) => g * s,
            (None, None) => 0.5 * omega_r,
        };
        chiralring::effective::EffectiveParams::new(omega_r, g, e.chirality_sign)
            .map_err(config_err)
    }
}
