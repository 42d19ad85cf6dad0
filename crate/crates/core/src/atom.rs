//! Two-level atoms at fixed positions inside the cavity.

use serde::{Deserialize, Serialize};

use crate::basis::ModeBasis;
use crate::dynamics::{band_shift, dipole_from_gamma};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomRole {
    Scatterer,
    Analyzer,
}

/// Half-open interval `[t_on, t_off)` during which the dipole is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Activation {
    pub t_on: f64,
    pub t_off: f64,
}

impl Activation {
    pub fn always() -> Self {
        Self { t_on: f64::NEG_INFINITY, t_off: f64::INFINITY }
    }

    pub fn from(t_on: f64) -> Self {
        Self { t_on, t_off: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.t_on <= t && t < self.t_off
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpec {
    pub position: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub dipole: f64,
    /// Resonance pull of the truncated mode band; the Hamiltonian uses the
    /// bare frequency `omega0 - band_shift`, so the dressed resonance is
    /// `omega0`. Zero unless set by [`AtomSpec::compensated`].
    pub band_shift: f64,
    pub schedule: Vec<Activation>,
    pub role: AtomRole,
}

impl AtomSpec {
    /// Builds an atom from its decay constant; the dipole follows from
    /// [`dipole_from_gamma`].
    pub fn new(position: f64, omega0: f64, gamma: f64, schedule: Vec<Activation>, role: AtomRole) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(invalid(format!("resonance frequency must be positive, got {omega0}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(invalid(format!("decay constant must be non-negative, got {gamma}")));
        }
        validate_schedule(&schedule)?;
        Ok(Self {
            position,
            omega0,
            gamma,
            dipole: dipole_from_gamma(gamma, omega0)?,
            band_shift: 0.0,
            schedule,
            role,
        })
    }

    pub fn always_on(position: f64, omega0: f64, gamma: f64, role: AtomRole) -> Result<Self> {
        Self::new(position, omega0, gamma, vec![Activation::always()], role)
    }

    /// Sets [`AtomSpec::band_shift`] for `basis`, so that `omega0` is the
    /// observed resonance rather than the bare one.
    pub fn compensated(mut self, basis: &ModeBasis) -> Result<Self> {
        self.band_shift = band_shift(basis, self.omega0, self.gamma)?;
        Ok(self)
    }

    /// Frequency on the Hamiltonian diagonal.
    pub fn bare_frequency(&self) -> f64 {
        self.omega0 - self.band_shift
    }

    pub fn is_active(&self, t: f64) -> bool {
        self.schedule.iter().any(|a| a.contains(t))
    }

    /// Checks `0 < r < L`.
    pub fn validate_in(&self, basis: &ModeBasis) -> Result<()> {
        if !(self.position > 0.0 && self.position < basis.length()) {
            return Err(invalid(format!(
                "atom position {} outside the open cavity (0, {})",
                self.position,
                basis.length()
            )));
        }
        Ok(())
    }

    /// Finite switching instants of this atom.
    pub fn events(&self) -> impl Iterator<Item = f64> + '_ {
        self.schedule
            .iter()
            .flat_map(|a| [a.t_on, a.t_off])
            .filter(|t| t.is_finite())
    }
}

fn validate_schedule(schedule: &[Activation]) -> Result<()> {
    for a in schedule {
        if a.t_on.is_nan() || a.t_off.is_nan() || a.t_on >= a.t_off {
            return Err(invalid(format!("activation interval [{}, {}) is empty or malformed", a.t_on, a.t_off)));
        }
    }
    for w in schedule.windows(2) {
        if w[1].t_on < w[0].t_off {
            return Err(invalid("activation intervals must be ordered and disjoint"));
        }
    }
    Ok(())
}
