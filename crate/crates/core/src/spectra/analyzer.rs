use serde::{Deserialize, Serialize};

use super::spectrum::{Provenance, Spectrum};
use crate::atom::{Activation, AtomRole, AtomSpec};
use crate::basis::ModeBasis;
use crate::error::{invalid, Error, Result};
use crate::state::SingleExcitationState;

/// Largest analyzer decay constant relative to the comb spacing.
pub const MAX_GAMMA_FRACTION: f64 = 0.1;
/// Default analyzer decay constant relative to the comb spacing.
pub const DEFAULT_GAMMA_FRACTION: f64 = 0.05;

/// A comb of weakly coupled, co-located two-level atoms acting as a
/// spectrometer. Atom `n` (0-based) resonates at `omega_min + n * spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerBank {
    pub name: String,
    pub n_atoms: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub position: f64,
    pub gamma: f64,
    pub t_on: f64,
    pub t_read: f64,
}

impl AnalyzerBank {
    /// A bank with `gamma` at its default fraction of the comb spacing.
    pub fn with_default_gamma(
        name: impl Into<String>,
        n_atoms: usize,
        (omega_min, omega_max): (f64, f64),
        position: f64,
        t_on: f64,
        t_read: f64,
    ) -> Self {
        let spacing = comb_spacing(n_atoms, omega_min, omega_max);
        Self {
            name: name.into(),
            n_atoms,
            omega_min,
            omega_max,
            position,
            gamma: DEFAULT_GAMMA_FRACTION * spacing,
            t_on,
            t_read,
        }
    }

    pub fn spacing(&self) -> f64 {
        comb_spacing(self.n_atoms, self.omega_min, self.omega_max)
    }

    pub fn comb(&self) -> Vec<f64> {
        let d = self.spacing();
        (0..self.n_atoms).map(|n| self.omega_min + n as f64 * d).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms < 2 {
            return Err(invalid(format!("bank `{}` needs at least 2 atoms", self.name)));
        }
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            return Err(invalid(format!(
                "bank `{}` needs 0 < omega_min < omega_max, got [{}, {}]",
                self.name, self.omega_min, self.omega_max
            )));
        }
        let limit = MAX_GAMMA_FRACTION * self.spacing();
        if !(self.gamma > 0.0 && self.gamma <= limit * (1.0 + 1e-12)) {
            return Err(invalid(format!(
                "bank `{}` gamma {} must lie in (0, spacing/10 = {limit}]",
                self.name, self.gamma
            )));
        }
        if !(self.t_on.is_finite() && self.t_read.is_finite() && self.t_on < self.t_read) {
            return Err(invalid(format!(
                "bank `{}` needs finite t_on < t_read, got {} and {}",
                self.name, self.t_on, self.t_read
            )));
        }
        Ok(())
    }

    pub fn validate_in(&self, basis: &ModeBasis) -> Result<()> {
        self.validate()?;
        if !(self.position > 0.0 && self.position < basis.length()) {
            return Err(invalid(format!(
                "bank `{}` position {} outside (0, {})",
                self.name,
                self.position,
                basis.length()
            )));
        }
        Ok(())
    }
}

fn comb_spacing(n_atoms: usize, omega_min: f64, omega_max: f64) -> f64 {
    (omega_max - omega_min) / (n_atoms.max(2) - 1) as f64
}

/// One analyzer atom per comb frequency, all at the bank position, switched
/// on at `t_on` and never off.
pub fn build_analyzer_bank(bank: &AnalyzerBank) -> Result<Vec<AtomSpec>> {
    bank.validate()?;
    bank.comb()
        .into_iter()
        .map(|w| AtomSpec::new(bank.position, w, bank.gamma, vec![Activation::from(bank.t_on)], AtomRole::Analyzer))
        .collect()
}

fn bank_slice<'a>(state: &'a SingleExcitationState, bank: &AnalyzerBank, first_atom: usize) -> Result<&'a [num_complex::Complex64]> {
    let end = first_atom + bank.n_atoms;
    if end > state.atoms.len() {
        return Err(Error::IndexOutOfRange { index: end - 1, len: state.atoms.len() });
    }
    Ok(&state.atoms[first_atom..end])
}

/// Excitation probabilities of the bank atoms against their comb frequencies.
/// The bank occupies `state.atoms[first_atom .. first_atom + n_atoms]`.
pub fn analyzer_spectrum(state: &SingleExcitationState, bank: &AnalyzerBank, first_atom: usize) -> Result<Spectrum> {
    if state.time < bank.t_read {
        return Err(Error::Precondition(format!(
            "bank `{}` read at t={} before its readout time {}",
            bank.name, state.time, bank.t_read
        )));
    }
    let values = bank_slice(state, bank, first_atom)?.iter().map(|c| c.norm_sqr()).collect();
    Spectrum::new(
        bank.comb(),
        values,
        Provenance::Analyzer { bank: bank.name.clone(), read_time: state.time },
    )
}

/// `sum_n omega_n |c_n|^2` over the bank atoms.
pub fn bank_absorbed_energy(state: &SingleExcitationState, bank: &AnalyzerBank, first_atom: usize) -> Result<f64> {
    Ok(bank_slice(state, bank, first_atom)?
        .iter()
        .zip(bank.comb())
        .map(|(c, w)| w * c.norm_sqr())
        .sum())
}
