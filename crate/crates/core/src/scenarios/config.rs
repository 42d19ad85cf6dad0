//! TOML codec for [`ExperimentSpec`]. The raw document types mirror the
//! materialized ones with optional fields; [`parse_experiment`] fills every
//! default so the returned spec is self-describing, and
//! [`render_experiment`] writes it back with nothing omitted.

use serde::Deserialize;

use super::{
    CavitySpec, ExperimentSpec, InitialStateSpec, IntegratorSpec, OutputSpec, ScattererSpec, DEFAULT_RANDOM_SEED,
};
use crate::atom::Activation;
use crate::dynamics::Backend;
use crate::error::{validation, Error, Result};
use crate::spectra::{AnalyzerBank, SpatialFilter, DEFAULT_GAMMA_FRACTION};
use crate::state::RandomPhotonBounds;

const DEFAULT_TRACE_SAMPLES: usize = 101;
const DEFAULT_TOLERANCE: f64 = 0.05;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: Option<String>,
    cavity: CavitySpec,
    initial_state: RawInitialState,
    #[serde(default)]
    atoms: Vec<RawAtom>,
    #[serde(default)]
    banks: Vec<RawBank>,
    #[serde(default)]
    outputs: Vec<RawOutput>,
    integrator: Option<RawIntegrator>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawInitialState {
    Gaussian {
        k0: f64,
        sigma_k: f64,
        r0: f64,
    },
    RandomMultiGaussian {
        n_components: usize,
        seed: Option<u64>,
        k_center: f64,
        bounds: RandomPhotonBounds,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    position: f64,
    omega0: f64,
    gamma: f64,
    schedule: Option<Vec<Activation>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBank {
    name: String,
    n_atoms: usize,
    omega_min: f64,
    omega_max: f64,
    position: f64,
    gamma: Option<f64>,
    t_on: Option<f64>,
    t_read: f64,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawOutput {
    EnergyDensity {
        name: String,
        times: Vec<f64>,
        n_points: Option<usize>,
    },
    ExcitationTrace {
        name: String,
        atoms: Vec<usize>,
        t_start: Option<f64>,
        t_end: f64,
        n_samples: Option<usize>,
    },
    AnalyzerSpectrum {
        name: String,
        bank: String,
        t_read: Option<f64>,
    },
    ModeSpectrum {
        name: String,
        time: f64,
        filter: Option<SpatialFilter>,
    },
    InitialSpectrum {
        name: String,
    },
    Comparison {
        name: String,
        a: String,
        b: String,
        tolerance: Option<f64>,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    backend: Option<Backend>,
    tol: Option<f64>,
    dt_max: Option<f64>,
    max_halvings: Option<u32>,
    samples_per_mode: Option<usize>,
    compensate_band_shift: Option<bool>,
}

/// Parses and validates an experiment document.
///
/// Syntax and schema problems (unknown keys, wrong types) become
/// [`Error::Parse`] with the line and key; physical or referential problems
/// become [`Error::Validation`] naming the field.
pub fn parse_experiment(text: &str) -> Result<ExperimentSpec> {
    let raw: RawExperiment = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let spec = resolve(raw)?;
    spec.validate()?;
    Ok(spec)
}

/// Serializes a spec with every field written out.
pub fn render_experiment(spec: &ExperimentSpec) -> Result<String> {
    toml::to_string(spec).map_err(|e| Error::Parse(e.to_string()))
}

fn resolve(raw: RawExperiment) -> Result<ExperimentSpec> {
    let initial_state = match raw.initial_state {
        RawInitialState::Gaussian { k0, sigma_k, r0 } => InitialStateSpec::Gaussian { k0, sigma_k, r0 },
        RawInitialState::RandomMultiGaussian { n_components, seed, k_center, bounds } => {
            InitialStateSpec::RandomMultiGaussian {
                n_components,
                seed: seed.unwrap_or(DEFAULT_RANDOM_SEED),
                k_center,
                bounds,
            }
        }
    };

    let atoms = raw
        .atoms
        .into_iter()
        .map(|a| ScattererSpec {
            position: a.position,
            omega0: a.omega0,
            gamma: a.gamma,
            schedule: a.schedule.unwrap_or_else(|| vec![Activation::always()]),
        })
        .collect();

    let mut banks = Vec::with_capacity(raw.banks.len());
    for (i, b) in raw.banks.into_iter().enumerate() {
        if b.n_atoms < 2 {
            return Err(validation(format!("banks[{i}].n_atoms"), "need at least 2 atoms"));
        }
        let mut bank = AnalyzerBank::with_default_gamma(
            b.name,
            b.n_atoms,
            (b.omega_min, b.omega_max),
            b.position,
            b.t_on.unwrap_or(0.0),
            b.t_read,
        );
        if let Some(g) = b.gamma {
            bank.gamma = g;
        }
        debug_assert!(b.gamma.is_some() || bank.gamma == DEFAULT_GAMMA_FRACTION * bank.spacing());
        banks.push(bank);
    }

    let mut outputs = Vec::with_capacity(raw.outputs.len());
    for (i, o) in raw.outputs.into_iter().enumerate() {
        outputs.push(match o {
            RawOutput::EnergyDensity { name, times, n_points } => OutputSpec::EnergyDensity {
                name,
                times,
                n_points: n_points.unwrap_or(8 * raw.cavity.n_modes + 1),
            },
            RawOutput::ExcitationTrace { name, atoms, t_start, t_end, n_samples } => OutputSpec::ExcitationTrace {
                name,
                atoms,
                t_start: t_start.unwrap_or(0.0),
                t_end,
                n_samples: n_samples.unwrap_or(DEFAULT_TRACE_SAMPLES),
            },
            RawOutput::AnalyzerSpectrum { name, bank, t_read } => {
                let t_read = match t_read {
                    Some(t) => t,
                    None => banks
                        .iter()
                        .find(|b| b.name == bank)
                        .map(|b| b.t_read)
                        .ok_or_else(|| validation(format!("outputs[{i}].bank"), format!("unknown bank `{bank}`")))?,
                };
                OutputSpec::AnalyzerSpectrum { name, bank, t_read }
            }
            RawOutput::ModeSpectrum { name, time, filter } => OutputSpec::ModeSpectrum {
                name,
                time,
                filter: filter.unwrap_or(SpatialFilter::Unit),
            },
            RawOutput::InitialSpectrum { name } => OutputSpec::InitialSpectrum { name },
            RawOutput::Comparison { name, a, b, tolerance } => OutputSpec::Comparison {
                name,
                a,
                b,
                tolerance: tolerance.unwrap_or(DEFAULT_TOLERANCE),
            },
        });
    }

    let d = IntegratorSpec::default();
    let ri = raw.integrator.unwrap_or_default();
    let integrator = IntegratorSpec {
        backend: ri.backend.unwrap_or(d.backend),
        tol: ri.tol.unwrap_or(d.tol),
        dt_max: ri.dt_max.unwrap_or(d.dt_max),
        max_halvings: ri.max_halvings.unwrap_or(d.max_halvings),
        samples_per_mode: ri.samples_per_mode.unwrap_or(d.samples_per_mode),
        compensate_band_shift: ri.compensate_band_shift.unwrap_or(d.compensate_band_shift),
    };

    Ok(ExperimentSpec {
        name: raw.name.unwrap_or_else(|| "experiment".to_string()),
        cavity: raw.cavity,
        initial_state,
        atoms,
        banks,
        outputs,
        integrator,
    })
}
