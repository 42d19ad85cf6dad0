//! Standing-wave sine modes of a closed one-dimensional cavity.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// The retained sine modes `sin(k_n r)`, `k_n = n pi / L`, `n = 1..=N`.
///
/// Natural units are used throughout (`c = hbar = eps0 = mu0 = 1`), so the
/// angular frequency of every mode equals its wavenumber. Mode `n` lives at
/// index `n - 1` of every per-mode slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    length: f64,
    wavenumbers: Vec<f64>,
}

impl ModeBasis {
    pub fn new(length: f64, n_modes: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("cavity length must be positive, got {length}")));
        }
        if n_modes == 0 {
            return Err(invalid("mode count must be at least 1"));
        }
        let wavenumbers = (1..=n_modes).map(|n| n as f64 * PI / length).collect();
        Ok(Self { length, wavenumbers })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Angular frequencies; identical to the wavenumbers since `c = 1`.
    pub fn frequencies(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn wavenumber(&self, index: usize) -> f64 {
        self.wavenumbers[index]
    }

    pub fn frequency(&self, index: usize) -> f64 {
        self.wavenumbers[index]
    }

    /// Spacing between adjacent mode wavenumbers, `pi / L`.
    pub fn spacing(&self) -> f64 {
        PI / self.length
    }

    pub fn omega_min(&self) -> f64 {
        self.wavenumbers[0]
    }

    pub fn omega_max(&self) -> f64 {
        self.wavenumbers[self.wavenumbers.len() - 1]
    }

    /// `G_n(r) = sin(k_n r)` for the mode at `index`.
    pub fn mode_function(&self, index: usize, r: f64) -> f64 {
        // Evaluate via the integer mode number so the mirrors land on exact
        // multiples of pi.
        let n = (index + 1) as f64;
        (n * PI * (r / self.length)).sin()
    }

    /// Field amplitude per photon of mode `index`, `sqrt(omega_n / L)`.
    pub fn field_weight(&self, index: usize) -> f64 {
        (self.wavenumbers[index] / self.length).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_pi_cavity_wavenumbers() {
        let b = ModeBasis::new(2.0 * PI, 400).unwrap();
        assert_relative_eq!(b.wavenumber(0), 0.5, epsilon = 1e-14);
        assert_relative_eq!(b.wavenumber(399), 200.0, epsilon = 1e-12);
        assert_relative_eq!(b.frequency(399), 200.0, epsilon = 1e-12);

        let b = ModeBasis::new(8.0 * PI, 1600).unwrap();
        assert_relative_eq!(b.omega_max(), 200.0, epsilon = 1e-12);

        let b = ModeBasis::new(PI, 1).unwrap();
        assert_relative_eq!(b.wavenumber(0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(ModeBasis::new(0.0, 10).is_err());
        assert!(ModeBasis::new(-1.0, 10).is_err());
        assert!(ModeBasis::new(f64::NAN, 10).is_err());
        assert!(ModeBasis::new(1.0, 0).is_err());
    }

    #[test]
    fn frequencies_strictly_increase() {
        let b = ModeBasis::new(3.7, 250).unwrap();
        assert!(b.frequencies().windows(2).all(|w| w[1] > w[0]));
        for (i, k) in b.wavenumbers().iter().enumerate() {
            assert_eq!(*k, (i + 1) as f64 * PI / 3.7);
        }
    }

    #[test]
    fn modes_vanish_at_mirrors() {
        let b = ModeBasis::new(2.0 * PI, 400).unwrap();
        for i in 0..b.len() {
            assert!(b.mode_function(i, 0.0).abs() < 1e-15);
            assert!(b.mode_function(i, b.length()).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonality_integral() {
        // Composite Simpson on a fine grid, independent of the trapezoid
        // quadrature used by the observables.
        let l = 2.0 * PI;
        let b = ModeBasis::new(l, 40).unwrap();
        let m = 20_000;
        let h = l / m as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut s = f(0.0) + f(l);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(i as f64 * h);
            }
            s * h / 3.0
        };
        for &(n, k) in &[(0, 0), (0, 1), (3, 3), (5, 17), (39, 39), (12, 38), (20, 21)] {
            let v = simpson(&|r| b.mode_function(n, r) * b.mode_function(k, r));
            let expected = if n == k { l / 2.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-9, "({n},{k}) -> {v}");
        }
    }
}
