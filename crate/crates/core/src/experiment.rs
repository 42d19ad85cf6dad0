//! Runs an [`ExperimentSpec`] end to end: one propagation, then every
//! requested output evaluated on the recorded states.

use serde::Serialize;

use crate::atom::AtomSpec;
use crate::basis::ModeBasis;
use crate::dynamics::{evolve, Diagnostics, Schedule, Trajectory};
use crate::error::{Error, Result};
use crate::observables::{energy_density_profile, SpatialGrid};
use crate::scenarios::{trace_times, ExperimentSpec, OutputSpec};
use crate::spectra::{
    analyzer_spectrum, bank_absorbed_energy, build_analyzer_bank, compare_spectra, filtered_mode_spectrum,
    initial_mode_spectrum, normalize_spectrum, Spectrum, SpectrumComparison,
};
use crate::state::SingleExcitationState;

#[derive(Debug, Clone, Serialize)]
pub struct EnergySnapshot {
    pub output: String,
    pub time: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcitationTrace {
    pub output: String,
    pub atoms: Vec<usize>,
    pub times: Vec<f64>,
    /// `values[i][k]`: excitation of `atoms[k]` at `times[i]`.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedSpectrum {
    pub name: String,
    /// Raw (unnormalized) samples.
    pub spectrum: Spectrum,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonOutcome {
    pub name: String,
    pub a: String,
    pub b: String,
    pub tolerance: f64,
    pub metrics: SpectrumComparison,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BankReadout {
    pub bank: String,
    pub read_time: f64,
    pub absorbed_energy: f64,
    pub field_energy: f64,
}

impl BankReadout {
    pub fn fraction(&self) -> f64 {
        self.absorbed_energy / self.field_energy
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub diagnostics: Diagnostics,
    /// Scatterers as simulated, including any applied band shift.
    pub scatterers: Vec<AtomSpec>,
    pub snapshots: Vec<EnergySnapshot>,
    pub traces: Vec<ExcitationTrace>,
    pub spectra: Vec<NamedSpectrum>,
    pub comparisons: Vec<ComparisonOutcome>,
    pub banks: Vec<BankReadout>,
}

impl ExperimentResult {
    pub fn spectrum(&self, name: &str) -> Option<&Spectrum> {
        self.spectra.iter().find(|s| s.name == name).map(|s| &s.spectrum)
    }

    pub fn comparison(&self, name: &str) -> Option<&ComparisonOutcome> {
        self.comparisons.iter().find(|c| c.name == name)
    }

    pub fn bank(&self, name: &str) -> Option<&BankReadout> {
        self.banks.iter().find(|b| b.bank == name)
    }
}

/// Basis, combined atom list (scatterers then banks) and initial state of an
/// experiment.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    pub basis: ModeBasis,
    pub atoms: Vec<AtomSpec>,
    pub state: SingleExcitationState,
}

pub fn prepare(spec: &ExperimentSpec) -> Result<PreparedSystem> {
    spec.validate()?;
    let basis = spec.basis()?;
    let mut atoms = Vec::with_capacity(spec.n_atoms());
    for a in &spec.atoms {
        atoms.push(a.to_atom()?);
    }
    for b in &spec.banks {
        atoms.extend(build_analyzer_bank(b)?);
    }
    if spec.integrator.compensate_band_shift {
        atoms = atoms.into_iter().map(|a| a.compensated(&basis)).collect::<Result<_>>()?;
    }
    let state = spec.initial_state.build(&basis)?.with_extra_atoms(atoms.len());
    Ok(PreparedSystem { basis, atoms, state })
}

/// Every instant the run must record, including bank readout times.
fn sample_times(spec: &ExperimentSpec) -> Vec<f64> {
    let mut times: Vec<f64> = spec.outputs.iter().flat_map(|o| o.sample_times()).collect();
    times.extend(spec.banks.iter().map(|b| b.t_read));
    times.push(0.0);
    times
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let system = prepare(spec)?;
    let times = sample_times(spec);
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let schedule = Schedule::new(&system.atoms, times, 0.0, horizon)?;
    log::info!(
        "{}: {} modes, {} atoms, horizon {horizon}, {} intervals",
        spec.name,
        system.basis.len(),
        system.atoms.len(),
        schedule.intervals().len()
    );
    let trajectory = evolve(&system.state, &system.basis, &system.atoms, &schedule, &spec.integrator.evolve_options())?;
    collect(spec, &system, &trajectory)
}

fn state_at(trajectory: &Trajectory, t: f64) -> Result<&SingleExcitationState> {
    trajectory
        .at(t)
        .ok_or_else(|| Error::Precondition(format!("no state recorded at t={t}")))
}

fn collect(spec: &ExperimentSpec, system: &PreparedSystem, trajectory: &Trajectory) -> Result<ExperimentResult> {
    let basis = &system.basis;
    let grid = SpatialGrid::for_basis(basis, spec.integrator.samples_per_mode)?;
    let mut snapshots = Vec::new();
    let mut traces = Vec::new();
    let mut spectra: Vec<NamedSpectrum> = Vec::new();
    let mut comparisons = Vec::new();

    for output in &spec.outputs {
        match output {
            OutputSpec::EnergyDensity { name, times, n_points } => {
                let plot_grid = SpatialGrid::new(basis.length(), *n_points)?;
                for &t in times {
                    let state = state_at(trajectory, t)?;
                    snapshots.push(EnergySnapshot {
                        output: name.clone(),
                        time: t,
                        r: plot_grid.points().to_vec(),
                        u: energy_density_profile(state, basis, &plot_grid),
                    });
                }
            }
            OutputSpec::ExcitationTrace { name, atoms, t_start, t_end, n_samples } => {
                let times = trace_times(*t_start, *t_end, *n_samples);
                let values = times
                    .iter()
                    .map(|&t| {
                        let s = state_at(trajectory, t)?;
                        atoms.iter().map(|&j| s.atom_excitation(j)).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                traces.push(ExcitationTrace { output: name.clone(), atoms: atoms.clone(), times, values });
            }
            OutputSpec::AnalyzerSpectrum { name, bank, t_read } => {
                let mut b = spec.bank(bank).cloned().ok_or_else(|| Error::Precondition(format!("no bank `{bank}`")))?;
                b.t_read = *t_read;
                let offset = spec.bank_offset(bank).expect("bank exists");
                let spectrum = analyzer_spectrum(state_at(trajectory, *t_read)?, &b, offset)?;
                spectra.push(NamedSpectrum { name: name.clone(), spectrum });
            }
            OutputSpec::ModeSpectrum { name, time, filter } => {
                let spectrum = filtered_mode_spectrum(state_at(trajectory, *time)?, basis, filter, &grid)?;
                spectra.push(NamedSpectrum { name: name.clone(), spectrum });
            }
            OutputSpec::InitialSpectrum { name } => {
                let spectrum = initial_mode_spectrum(&system.state, basis)?;
                spectra.push(NamedSpectrum { name: name.clone(), spectrum });
            }
            OutputSpec::Comparison { name, a, b, tolerance } => {
                let find = |n: &str| {
                    spectra
                        .iter()
                        .find(|s| s.name == n)
                        .map(|s| &s.spectrum)
                        .ok_or_else(|| Error::Precondition(format!("spectrum `{n}` not computed")))
                };
                let metrics = compare_spectra(&normalize_spectrum(find(a)?)?, &normalize_spectrum(find(b)?)?)?;
                comparisons.push(ComparisonOutcome {
                    name: name.clone(),
                    a: a.clone(),
                    b: b.clone(),
                    tolerance: *tolerance,
                    passed: metrics.l1 <= *tolerance,
                    metrics,
                });
            }
        }
    }

    let banks = spec
        .banks
        .iter()
        .map(|b| {
            let state = state_at(trajectory, b.t_read)?;
            Ok(BankReadout {
                bank: b.name.clone(),
                read_time: b.t_read,
                absorbed_energy: bank_absorbed_energy(state, b, spec.bank_offset(&b.name).expect("bank exists"))?,
                field_energy: state.field_energy(basis),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentResult {
        spec: spec.clone(),
        diagnostics: trajectory.diagnostics.clone(),
        scatterers: system.atoms[..spec.atoms.len()].to_vec(),
        snapshots,
        traces,
        spectra,
        comparisons,
        banks,
    })
}
