//! Single-excitation state vectors and initial photon constructors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::ModeBasis;
use crate::error::{invalid, Error, Result};

/// Width of the in-band guard, in units of `sigma_k`.
pub const BAND_GUARD_SIGMAS: f64 = 5.0;

/// Amplitudes of `|1_n, 0>` (one photon in mode `n`) and `|0, 1_j>` (atom `j`
/// excited) at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationState {
    pub modes: Vec<Complex64>,
    pub atoms: Vec<Complex64>,
    pub time: f64,
}

impl SingleExcitationState {
    pub fn new(modes: Vec<Complex64>, atoms: Vec<Complex64>, time: f64) -> Self {
        Self { modes, atoms, time }
    }

    /// A state with no excitation anywhere. Not normalizable.
    pub fn vacuum(n_modes: usize, n_atoms: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); n_modes], vec![Complex64::new(0.0, 0.0); n_atoms], 0.0)
    }

    /// Single atom excited, field empty.
    pub fn excited_atom(n_modes: usize, n_atoms: usize, atom: usize) -> Result<Self> {
        if atom >= n_atoms {
            return Err(Error::IndexOutOfRange { index: atom, len: n_atoms });
        }
        let mut s = Self::vacuum(n_modes, n_atoms);
        s.atoms[atom] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.modes.len() + self.atoms.len()
    }

    pub fn field_population(&self) -> f64 {
        self.modes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn atom_population(&self) -> f64 {
        self.atoms.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.field_population() + self.atom_population()
    }

    /// `sum_n omega_n |c_n|^2`, the normally ordered field energy.
    pub fn field_energy(&self, basis: &ModeBasis) -> f64 {
        self.modes
            .iter()
            .zip(basis.frequencies())
            .map(|(c, w)| w * c.norm_sqr())
            .sum()
    }

    /// Excitation probability `|c_j|^2` of atom `j`.
    pub fn atom_excitation(&self, j: usize) -> Result<f64> {
        self.atoms
            .get(j)
            .map(|c| c.norm_sqr())
            .ok_or(Error::IndexOutOfRange { index: j, len: self.atoms.len() })
    }

    /// Returns a copy padded with `extra` ground-state atoms.
    pub fn with_extra_atoms(mut self, extra: usize) -> Self {
        self.atoms.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), extra));
        self
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            modes: self.modes.iter().map(|c| c * factor).collect(),
            atoms: self.atoms.iter().map(|c| c * factor).collect(),
            time: self.time,
        }
    }

    /// Rescales to unit norm, leaving relative phases untouched.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("cannot normalize a zero state"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

pub fn normalize(state: &SingleExcitationState) -> Result<SingleExcitationState> {
    state.normalized()
}

/// Parameters of a Gaussian one-photon wavepacket.
///
/// `sigma_k` is the standard deviation of the mode distribution `|c_k|^2`.
/// The amplitude profile is `exp(-i k r0 - (k - k0)^2 / (4 sigma_k^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianPhotonSpec {
    pub k0: f64,
    pub sigma_k: f64,
    pub r0: f64,
}

impl GaussianPhotonSpec {
    pub fn new(k0: f64, sigma_k: f64, r0: f64) -> Self {
        Self { k0, sigma_k, r0 }
    }

    /// Builds the photon parameters from a full width `gamma_k = 2 sigma_k`.
    pub fn from_width(k0: f64, gamma_k: f64, r0: f64) -> Self {
        Self::new(k0, gamma_k / 2.0, r0)
    }

    /// Standard deviation of the energy density profile, `1 / (2 sigma_k)`.
    pub fn spatial_sigma(&self) -> f64 {
        1.0 / (2.0 * self.sigma_k)
    }

    pub fn validate(&self, basis: &ModeBasis) -> Result<()> {
        if !(self.sigma_k.is_finite() && self.sigma_k > 0.0) {
            return Err(invalid(format!("sigma_k must be positive, got {}", self.sigma_k)));
        }
        if !self.k0.is_finite() || !self.r0.is_finite() {
            return Err(invalid("k0 and r0 must be finite"));
        }
        check_band(basis, self.k0 - BAND_GUARD_SIGMAS * self.sigma_k, self.k0 + BAND_GUARD_SIGMAS * self.sigma_k)
    }

    /// Continuum-normalized amplitude `(2 pi sigma^2)^(-1/4) exp(...)` at `k`.
    pub fn amplitude(&self, k: f64) -> Complex64 {
        let prefactor = (2.0 * PI * self.sigma_k * self.sigma_k).powf(-0.25);
        let dk = k - self.k0;
        let envelope = (-dk * dk / (4.0 * self.sigma_k * self.sigma_k)).exp();
        Complex64::from_polar(prefactor * envelope, -k * self.r0)
    }
}

pub(crate) fn check_band(basis: &ModeBasis, lo: f64, hi: f64) -> Result<()> {
    if lo <= basis.omega_min() || hi >= basis.omega_max() {
        return Err(Error::OutOfBand {
            lo,
            hi,
            band_lo: basis.omega_min(),
            band_hi: basis.omega_max(),
        });
    }
    Ok(())
}

/// A Gaussian photon moving in `+r`, normalized on the discrete mode grid.
pub fn gaussian_photon_state(basis: &ModeBasis, spec: &GaussianPhotonSpec) -> Result<SingleExcitationState> {
    spec.validate(basis)?;
    let modes = basis.wavenumbers().iter().map(|&k| spec.amplitude(k)).collect();
    SingleExcitationState::new(modes, Vec::new(), 0.0).normalized()
}

/// Parameter ranges for a random superposition of Gaussian photons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPhotonBounds {
    /// Half-width of the uniform range of component centers around `k_center`.
    pub k0_spread: f64,
    pub sigma_k_min: f64,
    pub sigma_k_max: f64,
    pub r0_min: f64,
    pub r0_max: f64,
}

impl RandomPhotonBounds {
    pub fn validate(&self, basis: &ModeBasis, k_center: f64) -> Result<()> {
        if !(self.k0_spread >= 0.0) {
            return Err(invalid("k0_spread must be non-negative"));
        }
        if !(self.sigma_k_min > 0.0 && self.sigma_k_min <= self.sigma_k_max) {
            return Err(invalid("need 0 < sigma_k_min <= sigma_k_max"));
        }
        if !(self.r0_min > 0.0 && self.r0_min <= self.r0_max && self.r0_max < basis.length() / 2.0) {
            return Err(invalid(format!(
                "component centers must lie in the left half (0, {}); got [{}, {}]",
                basis.length() / 2.0,
                self.r0_min,
                self.r0_max
            )));
        }
        let reach = self.k0_spread + BAND_GUARD_SIGMAS * self.sigma_k_max;
        check_band(basis, k_center - reach, k_center + reach)
    }
}

/// Draws `n_components` photon parameter sets from a ChaCha8 stream seeded by
/// `seed`. Same seed, same draws, on every platform.
pub fn draw_components(n_components: usize, seed: u64, k_center: f64, bounds: &RandomPhotonBounds) -> Vec<GaussianPhotonSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_components)
        .map(|_| {
            let k0 = k_center + bounds.k0_spread * (2.0 * rng.gen::<f64>() - 1.0);
            let sigma_k = bounds.sigma_k_min + (bounds.sigma_k_max - bounds.sigma_k_min) * rng.gen::<f64>();
            let r0 = bounds.r0_min + (bounds.r0_max - bounds.r0_min) * rng.gen::<f64>();
            GaussianPhotonSpec { k0, sigma_k, r0 }
        })
        .collect()
}

/// Coherent sum of `n_components` randomly drawn Gaussian photons, each with
/// its continuum prefactor, renormalized on the mode grid.
pub fn random_multi_gaussian_state(
    basis: &ModeBasis,
    n_components: usize,
    seed: u64,
    k_center: f64,
    bounds: &RandomPhotonBounds,
) -> Result<SingleExcitationState> {
    if n_components == 0 {
        return Err(invalid("need at least one component"));
    }
    bounds.validate(basis, k_center)?;
    let components = draw_components(n_components, seed, k_center, bounds);
    let modes = basis
        .wavenumbers()
        .iter()
        .map(|&k| components.iter().map(|c| c.amplitude(k)).sum())
        .collect();
    SingleExcitationState::new(modes, Vec::new(), 0.0).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn one_atom_basis() -> ModeBasis {
        ModeBasis::new(2.0 * PI, 400).unwrap()
    }

    fn mean_wavenumber(basis: &ModeBasis, s: &SingleExcitationState) -> f64 {
        s.modes.iter().zip(basis.wavenumbers()).map(|(c, k)| k * c.norm_sqr()).sum::<f64>() / s.field_population()
    }

    #[test]
    fn gaussian_photon_is_normalized_and_centered() {
        let basis = one_atom_basis();
        let spec = GaussianPhotonSpec::new(100.0, 2.0 * PI, 2.0);
        let s = gaussian_photon_state(&basis, &spec).unwrap();
        assert_relative_eq!(s.norm_sqr(), 1.0, epsilon = 1e-10);
        assert!(s.atoms.is_empty());
        let mean = mean_wavenumber(&basis, &s);
        assert!((mean - 100.0).abs() < 0.1, "mean k = {mean}");
        assert!((mean - 100.0).abs() <= basis.spacing());
    }

    #[test]
    fn width_convention() {
        let spec = GaussianPhotonSpec::from_width(100.0, 4.0 * PI, 2.0);
        assert_relative_eq!(spec.sigma_k, 2.0 * PI);
        assert_relative_eq!(spec.spatial_sigma(), 1.0 / (4.0 * PI));
    }

    #[test]
    fn gaussian_photon_variance() {
        let basis = one_atom_basis();
        let spec = GaussianPhotonSpec::new(100.0, 2.0 * PI, 2.0);
        let s = gaussian_photon_state(&basis, &spec).unwrap();
        let var: f64 = s
            .modes
            .iter()
            .zip(basis.wavenumbers())
            .map(|(c, k)| (k - 100.0).powi(2) * c.norm_sqr())
            .sum();
        assert_relative_eq!(var.sqrt(), 2.0 * PI, max_relative = 1e-3);
    }

    #[test]
    fn rejects_out_of_band_support() {
        let basis = one_atom_basis();
        // 190 + 5 * 2 pi > 200
        let err = gaussian_photon_state(&basis, &GaussianPhotonSpec::new(190.0, 2.0 * PI, 2.0)).unwrap_err();
        assert!(matches!(err, Error::OutOfBand { .. }));
        assert!(gaussian_photon_state(&basis, &GaussianPhotonSpec::new(10.0, 2.0 * PI, 2.0)).is_err());
        assert!(gaussian_photon_state(&basis, &GaussianPhotonSpec::new(100.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn normalize_preserves_ratios() {
        let s = SingleExcitationState::new(
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, -2.0)],
            vec![Complex64::new(1.0, 1.0)],
            0.3,
        );
        let n = normalize(&s).unwrap();
        assert_relative_eq!(n.norm_sqr(), 1.0, epsilon = 1e-15);
        let ratio = n.modes[1] / n.modes[0];
        assert_relative_eq!(ratio.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(ratio.im, -1.0, epsilon = 1e-15);
        assert_eq!(n.time, 0.3);

        let twice = normalize(&n).unwrap();
        for (a, b) in twice.modes.iter().zip(&n.modes) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn normalize_zero_state_fails() {
        assert!(normalize(&SingleExcitationState::vacuum(4, 2)).is_err());
    }

    fn random_photon_bounds() -> RandomPhotonBounds {
        RandomPhotonBounds { k0_spread: 10.0, sigma_k_min: 1.0, sigma_k_max: 2.5, r0_min: 2.0, r0_max: 6.0 }
    }

    #[test]
    fn random_state_is_deterministic() {
        let basis = ModeBasis::new(8.0 * PI, 1600).unwrap();
        let a = random_multi_gaussian_state(&basis, 10, 7, 100.0, &random_photon_bounds()).unwrap();
        let b = random_multi_gaussian_state(&basis, 10, 7, 100.0, &random_photon_bounds()).unwrap();
        assert_eq!(a, b);
        let c = random_multi_gaussian_state(&basis, 10, 8, 100.0, &random_photon_bounds()).unwrap();
        assert_ne!(a, c);
        assert_relative_eq!(a.norm_sqr(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn single_component_matches_gaussian() {
        let basis = ModeBasis::new(8.0 * PI, 1600).unwrap();
        let bounds = random_photon_bounds();
        let drawn = draw_components(1, 99, 100.0, &bounds)[0];
        let a = random_multi_gaussian_state(&basis, 1, 99, 100.0, &bounds).unwrap();
        let b = gaussian_photon_state(&basis, &drawn).unwrap();
        for (x, y) in a.modes.iter().zip(&b.modes) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn random_bounds_are_checked() {
        let basis = ModeBasis::new(8.0 * PI, 1600).unwrap();
        let mut bounds = random_photon_bounds();
        bounds.r0_max = 20.0;
        assert!(random_multi_gaussian_state(&basis, 10, 1, 100.0, &bounds).is_err());
        let mut bounds = random_photon_bounds();
        bounds.k0_spread = 95.0;
        assert!(random_multi_gaussian_state(&basis, 10, 1, 100.0, &bounds).is_err());
        assert!(random_multi_gaussian_state(&basis, 0, 1, 100.0, &random_photon_bounds()).is_err());
    }

    proptest! {
        #[test]
        fn normalization_holds_for_any_valid_photon(k0 in 60.0f64..140.0, sigma in 0.5f64..8.0, r0 in 0.5f64..5.5) {
            let basis = one_atom_basis();
            let s = gaussian_photon_state(&basis, &GaussianPhotonSpec::new(k0, sigma, r0)).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            let mean = mean_wavenumber(&basis, &s);
            prop_assert!((mean - k0).abs() <= basis.spacing());
        }

        #[test]
        fn normalize_drift_is_tiny(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = || Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let s = SingleExcitationState::new((0..50).map(|_| c()).collect(), (0..5).map(|_| c()).collect(), 0.0);
            let n = normalize(&s).unwrap();
            prop_assert!((n.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
