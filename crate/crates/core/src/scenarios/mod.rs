//! Declarative experiment descriptions: the three built-in cavity
//! experiments and a TOML schema for user-defined ones.

mod builtin;
mod config;

pub use builtin::{
    scenario_by_name, scenario_one_atom, scenario_random_photon, scenario_three_atoms, BUILTIN_SCENARIOS,
    DEFAULT_RANDOM_SEED,
};
pub use config::{parse_experiment, render_experiment};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::atom::{Activation, AtomRole, AtomSpec};
use crate::basis::ModeBasis;
use crate::dynamics::{Backend, EvolveOptions};
use crate::error::{validation, Error, Result};
use crate::spectra::{AnalyzerBank, SpatialFilter};
use crate::state::{
    gaussian_photon_state, random_multi_gaussian_state, GaussianPhotonSpec, RandomPhotonBounds, SingleExcitationState,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySpec {
    pub length: f64,
    pub n_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialStateSpec {
    Gaussian {
        k0: f64,
        sigma_k: f64,
        r0: f64,
    },
    RandomMultiGaussian {
        n_components: usize,
        seed: u64,
        k_center: f64,
        bounds: RandomPhotonBounds,
    },
}

impl InitialStateSpec {
    pub fn seed(&self) -> Option<u64> {
        match self {
            InitialStateSpec::RandomMultiGaussian { seed, .. } => Some(*seed),
            InitialStateSpec::Gaussian { .. } => None,
        }
    }

    pub fn build(&self, basis: &ModeBasis) -> Result<SingleExcitationState> {
        match self {
            InitialStateSpec::Gaussian { k0, sigma_k, r0 } => {
                gaussian_photon_state(basis, &GaussianPhotonSpec::new(*k0, *sigma_k, *r0))
            }
            InitialStateSpec::RandomMultiGaussian { n_components, seed, k_center, bounds } => {
                random_multi_gaussian_state(basis, *n_components, *seed, *k_center, bounds)
            }
        }
    }
}

/// A scatterer atom as written in a configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScattererSpec {
    pub position: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub schedule: Vec<Activation>,
}

impl ScattererSpec {
    pub fn always_on(position: f64, omega0: f64, gamma: f64) -> Self {
        Self { position, omega0, gamma, schedule: vec![Activation::always()] }
    }

    pub fn to_atom(&self) -> Result<AtomSpec> {
        AtomSpec::new(self.position, self.omega0, self.gamma, self.schedule.clone(), AtomRole::Scatterer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputSpec {
    /// `|T(r)|^2` on `n_points` uniform points at each time.
    EnergyDensity { name: String, times: Vec<f64>, n_points: usize },
    /// Excitation probabilities of the listed atoms (indices into the
    /// combined list: scatterers first, then banks in order) on
    /// `n_samples` uniform times in `[t_start, t_end]`.
    ExcitationTrace {
        name: String,
        atoms: Vec<usize>,
        t_start: f64,
        t_end: f64,
        n_samples: usize,
    },
    AnalyzerSpectrum { name: String, bank: String, t_read: f64 },
    ModeSpectrum { name: String, time: f64, filter: SpatialFilter },
    /// `|c_n|^2` of the initial state.
    InitialSpectrum { name: String },
    /// L1 / Linf / peak-shift comparison of two named spectra.
    Comparison { name: String, a: String, b: String, tolerance: f64 },
}

impl OutputSpec {
    pub fn name(&self) -> &str {
        match self {
            OutputSpec::EnergyDensity { name, .. }
            | OutputSpec::ExcitationTrace { name, .. }
            | OutputSpec::AnalyzerSpectrum { name, .. }
            | OutputSpec::ModeSpectrum { name, .. }
            | OutputSpec::InitialSpectrum { name }
            | OutputSpec::Comparison { name, .. } => name,
        }
    }

    pub fn is_spectrum(&self) -> bool {
        matches!(
            self,
            OutputSpec::AnalyzerSpectrum { .. } | OutputSpec::ModeSpectrum { .. } | OutputSpec::InitialSpectrum { .. }
        )
    }

    /// Instants at which the state must be available.
    pub fn sample_times(&self) -> Vec<f64> {
        match self {
            OutputSpec::EnergyDensity { times, .. } => times.clone(),
            OutputSpec::ExcitationTrace { t_start, t_end, n_samples, .. } => trace_times(*t_start, *t_end, *n_samples),
            OutputSpec::AnalyzerSpectrum { t_read, .. } => vec![*t_read],
            OutputSpec::ModeSpectrum { time, .. } => vec![*time],
            OutputSpec::InitialSpectrum { .. } | OutputSpec::Comparison { .. } => Vec::new(),
        }
    }
}

pub(crate) fn trace_times(t_start: f64, t_end: f64, n_samples: usize) -> Vec<f64> {
    if n_samples < 2 {
        return vec![t_start];
    }
    let step = (t_end - t_start) / (n_samples - 1) as f64;
    (0..n_samples)
        .map(|i| if i + 1 == n_samples { t_end } else { t_start + i as f64 * step })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub backend: Backend,
    pub tol: f64,
    pub dt_max: f64,
    pub max_halvings: u32,
    /// Quadrature points per mode for reconstruction grids.
    pub samples_per_mode: usize,
    /// Pin dressed atomic resonances at their nominal `omega0` by
    /// subtracting the truncated-band shift from the bare frequency.
    pub compensate_band_shift: bool,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        let e = EvolveOptions::default();
        Self {
            backend: e.backend,
            tol: e.tol,
            dt_max: e.dt_max,
            max_halvings: e.max_halvings,
            samples_per_mode: 8,
            compensate_band_shift: true,
        }
    }
}

impl IntegratorSpec {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { backend: self.backend, tol: self.tol, dt_max: self.dt_max, max_halvings: self.max_halvings }
    }
}

/// A fully materialized experiment: every default has been filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub cavity: CavitySpec,
    pub initial_state: InitialStateSpec,
    pub atoms: Vec<ScattererSpec>,
    pub banks: Vec<AnalyzerBank>,
    pub outputs: Vec<OutputSpec>,
    pub integrator: IntegratorSpec,
}

impl ExperimentSpec {
    pub fn basis(&self) -> Result<ModeBasis> {
        ModeBasis::new(self.cavity.length, self.cavity.n_modes)
    }

    pub fn bank(&self, name: &str) -> Option<&AnalyzerBank> {
        self.banks.iter().find(|b| b.name == name)
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len() + self.banks.iter().map(|b| b.n_atoms).sum::<usize>()
    }

    /// Index of the first atom of bank `name` in the combined atom list.
    pub fn bank_offset(&self, name: &str) -> Option<usize> {
        let mut offset = self.atoms.len();
        for b in &self.banks {
            if b.name == name {
                return Some(offset);
            }
            offset += b.n_atoms;
        }
        None
    }

    /// Latest instant any output needs.
    pub fn horizon(&self) -> f64 {
        self.outputs
            .iter()
            .flat_map(|o| o.sample_times())
            .fold(0.0, f64::max)
    }

    /// Checks every physical and referential constraint. Errors name the
    /// offending field with a path such as `atoms[0].position`.
    pub fn validate(&self) -> Result<()> {
        let field = |path: String, e: Error| match e {
            Error::Validation { .. } => e,
            other => validation(path, other.to_string()),
        };
        if self.name.trim().is_empty() {
            return Err(validation("name", "must not be empty"));
        }
        let basis = self.basis().map_err(|e| field("cavity".into(), e))?;
        let length = basis.length();

        self.initial_state
            .build(&basis)
            .map(|_| ())
            .map_err(|e| field("initial_state".into(), e))?;

        for (i, a) in self.atoms.iter().enumerate() {
            let path = |k: &str| format!("atoms[{i}].{k}");
            if !(a.position > 0.0 && a.position < length) {
                return Err(validation(path("position"), format!("{} is outside the cavity (0, {length})", a.position)));
            }
            if !(a.omega0 > basis.omega_min() && a.omega0 < basis.omega_max()) {
                return Err(validation(
                    path("omega0"),
                    format!("{} is outside the mode band [{}, {}]", a.omega0, basis.omega_min(), basis.omega_max()),
                ));
            }
            a.to_atom().map_err(|e| field(path("gamma/schedule"), e))?;
        }

        let mut names = HashSet::new();
        for (i, b) in self.banks.iter().enumerate() {
            let path = |k: &str| format!("banks[{i}].{k}");
            if !names.insert(b.name.as_str()) {
                return Err(validation(path("name"), format!("duplicate bank name `{}`", b.name)));
            }
            if !(b.position > 0.0 && b.position < length) {
                return Err(validation(path("position"), format!("{} is outside the cavity (0, {length})", b.position)));
            }
            if !(b.omega_min > basis.omega_min() && b.omega_max < basis.omega_max()) {
                return Err(validation(path("omega_min/omega_max"), "comb must lie inside the mode band"));
            }
            b.validate().map_err(|e| field(path("*"), e))?;
        }

        if self.outputs.is_empty() {
            return Err(validation("outputs", "at least one output is required"));
        }
        let n_atoms = self.n_atoms();
        let mut output_names = HashSet::new();
        let mut spectra = HashSet::new();
        for (i, o) in self.outputs.iter().enumerate() {
            let path = |k: &str| format!("outputs[{i}].{k}");
            if o.name().trim().is_empty() || !output_names.insert(o.name()) {
                return Err(validation(path("name"), format!("empty or duplicate output name `{}`", o.name())));
            }
            if o.sample_times().iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(validation(path("time"), "sample times must be finite and non-negative"));
            }
            match o {
                OutputSpec::EnergyDensity { times, n_points, .. } => {
                    if times.is_empty() {
                        return Err(validation(path("times"), "at least one time is required"));
                    }
                    if *n_points < 2 {
                        return Err(validation(path("n_points"), "need at least 2 points"));
                    }
                }
                OutputSpec::ExcitationTrace { atoms, t_start, t_end, n_samples, .. } => {
                    if atoms.is_empty() {
                        return Err(validation(path("atoms"), "at least one atom is required"));
                    }
                    if let Some(j) = atoms.iter().find(|&&j| j >= n_atoms) {
                        return Err(validation(path("atoms"), format!("index {j} out of range for {n_atoms} atoms")));
                    }
                    if !(t_end >= t_start) || *n_samples == 0 {
                        return Err(validation(path("t_end"), "need t_end >= t_start and n_samples >= 1"));
                    }
                }
                OutputSpec::AnalyzerSpectrum { bank, t_read, .. } => {
                    let b = self
                        .bank(bank)
                        .ok_or_else(|| validation(path("bank"), format!("unknown bank `{bank}`")))?;
                    if !(*t_read > b.t_on) {
                        return Err(validation(path("t_read"), format!("must exceed the bank activation time {}", b.t_on)));
                    }
                }
                OutputSpec::ModeSpectrum { filter, .. } => {
                    filter.validate(length).map_err(|e| field(path("filter"), e))?;
                }
                OutputSpec::InitialSpectrum { .. } => {}
                OutputSpec::Comparison { a, b, tolerance, .. } => {
                    for (key, target) in [("a", a), ("b", b)] {
                        if !spectra.contains(target.as_str()) {
                            return Err(validation(
                                path(key),
                                format!("`{target}` is not a spectrum output declared before this comparison"),
                            ));
                        }
                    }
                    if !(*tolerance >= 0.0) {
                        return Err(validation(path("tolerance"), "must be non-negative"));
                    }
                }
            }
            if o.is_spectrum() {
                spectra.insert(o.name());
            }
        }

        let i = &self.integrator;
        if !(i.tol > 0.0 && i.dt_max > 0.0) {
            return Err(validation("integrator.tol", "tol and dt_max must be positive"));
        }
        if i.samples_per_mode < 4 {
            return Err(validation("integrator.samples_per_mode", "need at least 4 points per mode"));
        }
        Ok(())
    }
}
