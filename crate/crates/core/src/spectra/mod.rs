//! Local spectra: windowed mode reconstruction and analyzer-atom readout,
//! plus normalization and comparison.

mod analyzer;
mod filter;
mod spectrum;

pub use analyzer::{
    analyzer_spectrum, bank_absorbed_energy, build_analyzer_bank, AnalyzerBank, DEFAULT_GAMMA_FRACTION,
    MAX_GAMMA_FRACTION,
};
pub use filter::{apply_filter, SpatialFilter};
pub use spectrum::{compare_spectra, normalize_spectrum, Provenance, Spectrum, SpectrumComparison};

use num_complex::Complex64;

use crate::basis::ModeBasis;
use crate::error::Result;
use crate::observables::{
    corr_w, project_onto_modes, reconstruct_products_from_w, resolve_separable, t_field, SpatialGrid,
};
use crate::state::SingleExcitationState;

/// `|c_p|^2` against `omega_p` reconstructed from the filtered correlation
/// kernel of `state`. Separable filters reduce the double integral to a
/// product of single projections of `g T`.
pub fn filtered_mode_spectrum(
    state: &SingleExcitationState,
    basis: &ModeBasis,
    filter: &SpatialFilter,
    grid: &SpatialGrid,
) -> Result<Spectrum> {
    filter.validate(basis.length())?;
    grid.check_resolves(basis)?;
    let windowed: Vec<Complex64> = t_field(state, basis, grid)
        .into_iter()
        .zip(grid.points())
        .map(|(t, &r)| t * filter.weight(r))
        .collect();
    let modes = resolve_separable(&project_onto_modes(&windowed, basis, grid))?;
    mode_spectrum(basis, modes.powers(), filter, state.time)
}

/// Same quantity through the full kernel: builds `W`, filters it and runs the
/// generic double-integral reconstruction. Quadratic in grid size.
pub fn filtered_mode_spectrum_dense(
    state: &SingleExcitationState,
    basis: &ModeBasis,
    filter: &SpatialFilter,
    grid: &SpatialGrid,
) -> Result<Spectrum> {
    let field = apply_filter(&corr_w(state, basis, grid), filter)?;
    let modes = reconstruct_products_from_w(&field, basis)?;
    mode_spectrum(basis, modes.powers(), filter, state.time)
}

fn mode_spectrum(basis: &ModeBasis, powers: Vec<f64>, filter: &SpatialFilter, time: f64) -> Result<Spectrum> {
    Spectrum::new(
        basis.frequencies().to_vec(),
        powers,
        Provenance::ModeReconstruction { filter: filter.label(), time },
    )
}

/// `|c_n|^2` of the stored amplitudes.
pub fn initial_mode_spectrum(state: &SingleExcitationState, basis: &ModeBasis) -> Result<Spectrum> {
    Spectrum::new(
        basis.frequencies().to_vec(),
        state.modes.iter().map(|c| c.norm_sqr()).collect(),
        Provenance::InitialState,
    )
}
