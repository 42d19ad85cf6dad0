use std::f64::consts::PI;

use super::{CavitySpec, ExperimentSpec, InitialStateSpec, IntegratorSpec, OutputSpec, ScattererSpec};
use crate::error::{invalid, Result};
use crate::spectra::{AnalyzerBank, SpatialFilter};
use crate::state::RandomPhotonBounds;

pub const BUILTIN_SCENARIOS: [&str; 3] = ["one_atom", "three_atoms", "random_photon"];
pub const DEFAULT_RANDOM_SEED: u64 = 42;

const BANK_SIZE: usize = 200;
/// Analyzer decay constant of the built-in banks relative to the comb
/// spacing. Each bank then absorbs well under 1% of the passing field.
const BUILTIN_GAMMA_FRACTION: f64 = 1.0 / 400.0;

/// Looks up a built-in scenario; `seed` only affects `random_photon`.
pub fn scenario_by_name(name: &str, seed: Option<u64>) -> Result<ExperimentSpec> {
    match name {
        "one_atom" => Ok(scenario_one_atom()),
        "three_atoms" => Ok(scenario_three_atoms()),
        "random_photon" => Ok(scenario_random_photon(seed.unwrap_or(DEFAULT_RANDOM_SEED))),
        other => Err(invalid(format!(
            "unknown scenario `{other}`; expected one of {}",
            BUILTIN_SCENARIOS.join(", ")
        ))),
    }
}

fn bank(name: &str, span: (f64, f64), position: f64, t_on: f64, t_read: f64) -> AnalyzerBank {
    let mut b = AnalyzerBank::with_default_gamma(name, BANK_SIZE, span, position, t_on, t_read);
    b.gamma = BUILTIN_GAMMA_FRACTION * b.spacing();
    b
}

fn boxcar(r_min: f64, r_max: f64) -> SpatialFilter {
    SpatialFilter::Boxcar { r_min, r_max }
}

fn analyzer(name: &str, bank: &str, t_read: f64) -> OutputSpec {
    OutputSpec::AnalyzerSpectrum { name: name.into(), bank: bank.into(), t_read }
}

fn mode(name: &str, time: f64, filter: SpatialFilter) -> OutputSpec {
    OutputSpec::ModeSpectrum { name: name.into(), time, filter }
}

fn comparison(name: &str, a: &str, b: &str) -> OutputSpec {
    OutputSpec::Comparison { name: name.into(), a: a.into(), b: b.into(), tolerance: 0.05 }
}

/// Left / right analyzer-versus-mode pairs shared by all scenarios.
fn side_outputs(length: f64, t_read: f64, t_mode: f64) -> Vec<OutputSpec> {
    vec![
        analyzer("left_analyzer", "left", t_read),
        mode("left_mode", t_mode, boxcar(0.0, length / 2.0)),
        analyzer("right_analyzer", "right", t_read),
        mode("right_mode", t_mode, boxcar(length / 2.0, length)),
        comparison("left", "left_analyzer", "left_mode"),
        comparison("right", "right_analyzer", "right_mode"),
    ]
}

/// One resonant atom at the cavity center splitting a Gaussian photon.
///
/// Three banks of 200 analyzers: `left` at r = 1.8 (on from t = 1.5),
/// `right` at L/2 + 1 (always on) and `right_late` at the same place,
/// switched on once the transmitted pulse has passed (three spatial
/// standard deviations behind its center). The transmitted pulse alone is
/// read from `right` at that switching time; the field passing afterwards
/// (the atomic decay) from `right_late`. The matching mode spectra split the
/// right half at the point the switching instant maps to at `t_mode`.
pub fn scenario_one_atom() -> ExperimentSpec {
    let length = 2.0 * PI;
    let n_modes = 400;
    let (k0, sigma_k, r0) = (100.0, 2.0 * PI, 2.0);
    let center = length / 2.0;
    let r_right = center + 1.0;
    let sigma_x = 1.0 / (2.0 * sigma_k);
    let t_switch = (r_right - r0) + 3.0 * sigma_x;
    let (t_mode, t_read) = (3.8, 5.5);
    let split = r_right + (t_mode - t_switch);
    let span = (80.0, 120.0);

    let mut outputs = vec![
        OutputSpec::EnergyDensity { name: "energy_density".into(), times: vec![0.0, t_mode], n_points: 8 * n_modes + 1 },
        OutputSpec::ExcitationTrace {
            name: "center_atom".into(),
            atoms: vec![0],
            t_start: 0.0,
            t_end: t_read,
            n_samples: 111,
        },
        OutputSpec::InitialSpectrum { name: "initial".into() },
    ];
    outputs.extend(side_outputs(length, t_read, t_mode));
    outputs.extend([
        analyzer("peak1_analyzer", "right", t_switch),
        mode("peak1_mode", t_mode, boxcar(split, length)),
        analyzer("peak2_analyzer", "right_late", t_read),
        mode("peak2_mode", t_mode, boxcar(center, split)),
        comparison("peak1", "peak1_analyzer", "peak1_mode"),
        comparison("peak2", "peak2_analyzer", "peak2_mode"),
    ]);

    ExperimentSpec {
        name: "one_atom".into(),
        cavity: CavitySpec { length, n_modes },
        initial_state: InitialStateSpec::Gaussian { k0, sigma_k, r0 },
        atoms: vec![ScattererSpec::always_on(center, 100.0, PI)],
        banks: vec![
            bank("left", span, 1.8, 1.5, t_read),
            bank("right", span, r_right, 0.0, t_read),
            bank("right_late", span, r_right, t_switch, t_read),
        ],
        outputs,
        integrator: IntegratorSpec::default(),
    }
}

/// Three co-located atoms (90, pi), (100, pi), (110, pi/4) and a broader
/// photon in a cavity four times longer; every position and switching time
/// of the one-atom layout is scaled by four.
pub fn scenario_three_atoms() -> ExperimentSpec {
    let length = 8.0 * PI;
    let n_modes = 1600;
    let center = length / 2.0;
    let (t_mode, t_read) = (16.5, 23.0);
    let span = (80.0, 120.0);

    let mut outputs = vec![
        OutputSpec::EnergyDensity { name: "energy_density".into(), times: vec![0.0, t_mode], n_points: 8 * n_modes + 1 },
        OutputSpec::ExcitationTrace {
            name: "center_atoms".into(),
            atoms: vec![0, 1, 2],
            t_start: 0.0,
            t_end: t_read,
            n_samples: 231,
        },
        OutputSpec::InitialSpectrum { name: "initial".into() },
    ];
    outputs.extend(side_outputs(length, t_read, t_mode));

    ExperimentSpec {
        name: "three_atoms".into(),
        cavity: CavitySpec { length, n_modes },
        initial_state: InitialStateSpec::Gaussian { k0: 100.0, sigma_k: 4.0 * PI, r0: 8.0 },
        atoms: vec![
            ScattererSpec::always_on(center, 90.0, PI),
            ScattererSpec::always_on(center, 100.0, PI),
            ScattererSpec::always_on(center, 110.0, PI / 4.0),
        ],
        banks: vec![bank("left", span, 7.2, 6.0, t_read), bank("right", span, center + 4.0, 0.0, t_read)],
        outputs,
        integrator: IntegratorSpec::default(),
    }
}

/// A superposition of ten random Gaussian photons, all starting in the left
/// quarter and moving right, split by one resonant atom. The left bank
/// switches on after the whole incident field has passed it.
pub fn scenario_random_photon(seed: u64) -> ExperimentSpec {
    let length = 8.0 * PI;
    let n_modes = 1600;
    let center = length / 2.0;
    let (t_mode, t_read) = (20.0, 23.0);
    let span = (75.0, 125.0);
    let bounds = RandomPhotonBounds { k0_spread: 10.0, sigma_k_min: 1.0, sigma_k_max: 2.5, r0_min: 2.0, r0_max: 6.0 };

    let mut outputs = vec![
        OutputSpec::EnergyDensity { name: "energy_density".into(), times: vec![0.0, t_mode], n_points: 8 * n_modes + 1 },
        OutputSpec::ExcitationTrace {
            name: "center_atom".into(),
            atoms: vec![0],
            t_start: 0.0,
            t_end: t_read,
            n_samples: 231,
        },
        OutputSpec::InitialSpectrum { name: "initial".into() },
    ];
    outputs.extend(side_outputs(length, t_read, t_mode));
    outputs.extend([
        mode("full_mode", t_mode, SpatialFilter::Unit),
        comparison("elastic", "initial", "full_mode"),
    ]);

    ExperimentSpec {
        name: "random_photon".into(),
        cavity: CavitySpec { length, n_modes },
        initial_state: InitialStateSpec::RandomMultiGaussian { n_components: 10, seed, k_center: 100.0, bounds },
        atoms: vec![ScattererSpec::always_on(center, 100.0, PI)],
        banks: vec![bank("left", span, 7.2, 7.5, t_read), bank("right", span, center + 4.0, 0.0, t_read)],
        outputs,
        integrator: IntegratorSpec::default(),
    }
}
