//! Single-excitation Hamiltonian and its time evolution.
//!
//! The state is kept in the flat ordering `[modes..., atoms...]`. Atomic
//! energies are measured from the ground state (`omega0` for the excited
//! level) since the `+-omega0/2` convention only adds a global phase inside
//! the one-excitation sector.

mod hamiltonian;
mod propagate;
mod schedule;

pub use hamiltonian::{assemble_hamiltonian, CoupledHamiltonian};
pub use propagate::{atom_excitation, evolve, Backend, Diagnostics, EvolveOptions, Trajectory};
pub use schedule::Schedule;

use crate::basis::ModeBasis;
use crate::error::{invalid, Result};

/// Dipole magnitude `D = sqrt(gamma / omega0)` of an atom whose
/// spontaneous decay rate into the one-dimensional cavity continuum is
/// `gamma`.
///
/// Fermi's golden rule with coupling `sqrt(omega/L) sin(k r) D`, mode
/// density `L / pi` and the position average `<sin^2> = 1/2` gives
/// `gamma = D^2 omega0`, independent of the cavity length.
pub fn dipole_from_gamma(gamma: f64, omega0: f64) -> Result<f64> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(invalid(format!("resonance frequency must be positive, got {omega0}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(invalid(format!("decay constant must be non-negative, got {gamma}")));
    }
    Ok((gamma / omega0).sqrt())
}

/// Resonance pull `Delta` of an atom coupled to the retained modes in the
/// rotating-wave approximation: the dressed resonance sits at
/// `omega_bare + Delta`.
///
/// Uses the local (continuum, position-averaged) principal value
/// `D^2 / (2 pi) [omega0 ln((omega0 - w_lo) / (w_hi - omega0)) - (w_hi - w_lo)]`
/// over the band edges `w_lo, w_hi` (mode frequencies padded by half a
/// spacing). For a band centered on `omega0` this is `-D^2 N / (2 L)`.
pub fn band_shift(basis: &ModeBasis, omega0: f64, gamma: f64) -> Result<f64> {
    let d2 = dipole_from_gamma(gamma, omega0)?.powi(2);
    let half = basis.spacing() / 2.0;
    let (lo, hi) = (basis.omega_min() - half, basis.omega_max() + half);
    if !(omega0 > lo && omega0 < hi) {
        return Err(invalid(format!("resonance {omega0} outside the retained band ({lo}, {hi})")));
    }
    Ok(d2 / (2.0 * std::f64::consts::PI) * (omega0 * ((omega0 - lo) / (hi - omega0)).ln() - (hi - lo)))
}
