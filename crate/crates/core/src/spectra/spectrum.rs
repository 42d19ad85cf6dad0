use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Analyzer { bank: String, read_time: f64 },
    ModeReconstruction { filter: String, time: f64 },
    InitialState,
    Derived { note: String },
}

impl Provenance {
    pub fn describe(&self) -> String {
        match self {
            Provenance::Analyzer { bank, read_time } => format!("analyzer bank `{bank}` read at t={read_time}"),
            Provenance::ModeReconstruction { filter, time } => format!("mode reconstruction, filter {filter}, t={time}"),
            Provenance::InitialState => "initial state mode distribution".to_string(),
            Provenance::Derived { note } => note.clone(),
        }
    }
}

/// Sampled intensity against angular frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub normalized: bool,
    pub provenance: Provenance,
}

impl Spectrum {
    pub fn new(omega: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if omega.len() != values.len() || omega.len() < 2 {
            return Err(invalid("spectrum needs at least two samples and matching lengths"));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("spectrum frequencies must be strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("spectrum values must be finite and non-negative"));
        }
        Ok(Self { omega, values, normalized: false, provenance })
    }

    pub fn area(&self) -> f64 {
        trapezoid(&self.omega, &self.values)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    /// Linear interpolation; zero outside the support.
    pub fn interpolate(&self, w: f64) -> f64 {
        let (lo, hi) = self.support();
        if w < lo || w > hi {
            return 0.0;
        }
        let i = self.omega.partition_point(|&x| x <= w);
        if i == 0 {
            return self.values[0];
        }
        if i >= self.omega.len() {
            return self.values[self.omega.len() - 1];
        }
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let f = (w - w0) / (w1 - w0);
        self.values[i - 1] * (1.0 - f) + self.values[i] * f
    }

    /// Samples restricted to `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64) -> Result<Self> {
        let (omega, values): (Vec<f64>, Vec<f64>) = self
            .omega
            .iter()
            .zip(&self.values)
            .filter(|(w, _)| **w >= lo && **w <= hi)
            .map(|(w, v)| (*w, *v))
            .unzip();
        let mut s = Spectrum::new(omega, values, self.provenance.clone())?;
        s.normalized = false;
        Ok(s)
    }

    pub fn argmax(&self) -> usize {
        (0..self.values.len())
            .max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
            .unwrap_or(0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Interior strict local maxima whose value exceeds `fraction` of the
    /// global maximum. Plateaus count once.
    pub fn local_maxima(&self, fraction: f64) -> Vec<usize> {
        let threshold = fraction * self.max();
        extrema(&self.values, |a, b| a > b)
            .into_iter()
            .filter(|&i| self.values[i] > threshold)
            .collect()
    }

    /// Interior local minima whose prominence exceeds `prominence` times the
    /// global maximum. The prominence of a dip is the smaller of the two
    /// highest points reached walking away from it on either side before the
    /// spectrum drops below the dip value again.
    pub fn local_minima(&self, prominence: f64) -> Vec<usize> {
        let floor = prominence * self.max();
        let v = &self.values;
        let rise = |range: &mut dyn Iterator<Item = usize>, level: f64| {
            let mut top = level;
            for j in range {
                if v[j] < level {
                    break;
                }
                top = top.max(v[j]);
            }
            top
        };
        extrema(v, |a, b| a < b)
            .into_iter()
            .filter(|&i| {
                let left = rise(&mut (0..i).rev(), v[i]);
                let right = rise(&mut (i + 1..v.len()), v[i]);
                left.min(right) - v[i] > floor
            })
            .collect()
    }

    /// Full width at half maximum of the peak at `index`, using linear
    /// interpolation of the half-level crossings.
    pub fn peak_fwhm(&self, index: usize) -> Option<f64> {
        let half = self.values[index] / 2.0;
        let crossing = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
            for i in range {
                let j = (i as isize + step) as usize;
                if self.values[j] <= half {
                    let (wi, wj) = (self.omega[i], self.omega[j]);
                    let (vi, vj) = (self.values[i], self.values[j]);
                    return Some(wi + (half - vi) * (wj - wi) / (vj - vi));
                }
            }
            None
        };
        let right = crossing(&mut (index..self.len() - 1), 1)?;
        let left = crossing(&mut (1..=index).rev(), -1)?;
        Some(right - left)
    }

    /// Width of the dip at `index`: distance between the points where the
    /// spectrum climbs back to the midpoint between the dip value and the
    /// lower of its two enclosing maxima.
    pub fn dip_width(&self, index: usize) -> Option<f64> {
        let mut l = index;
        while l > 0 && self.values[l - 1] >= self.values[l] {
            l -= 1;
        }
        let mut r = index;
        while r + 1 < self.len() && self.values[r + 1] >= self.values[r] {
            r += 1;
        }
        let top = self.values[l].min(self.values[r]);
        let level = (top + self.values[index]) / 2.0;
        let find = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
            for i in range {
                let j = (i as isize + step) as usize;
                if self.values[j] >= level {
                    let (wi, wj) = (self.omega[i], self.omega[j]);
                    let (vi, vj) = (self.values[i], self.values[j]);
                    return Some(wi + (level - vi) * (wj - wi) / (vj - vi));
                }
            }
            None
        };
        let right = find(&mut (index..r), 1)?;
        let left = find(&mut (l + 1..=index).rev(), -1)?;
        Some(right - left)
    }
}

fn extrema(values: &[f64], better: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if better(values[i], values[i - 1]) {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && better(values[i], values[j + 1]) {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Scales to unit trapezoid area.
pub fn normalize_spectrum(s: &Spectrum) -> Result<Spectrum> {
    let area = s.area();
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(Spectrum {
        omega: s.omega.clone(),
        values: s.values.iter().map(|v| v / area).collect(),
        normalized: true,
        provenance: s.provenance.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    /// `int |a - b| d omega` on the common grid.
    pub l1: f64,
    pub linf: f64,
    /// Difference of the global maximum locations, `argmax b - argmax a`.
    pub peak_shift: f64,
    pub overlap: (f64, f64),
}

/// Compares two spectra on the union of their sample points inside the
/// shared frequency range. Both are renormalized to unit area on that range
/// first, so spectra sampled on different spans compare by shape.
pub fn compare_spectra(a: &Spectrum, b: &Spectrum) -> Result<SpectrumComparison> {
    let (a_lo, a_hi) = a.support();
    let (b_lo, b_hi) = b.support();
    let lo = a_lo.max(b_lo);
    let hi = a_hi.min(b_hi);
    if !(hi > lo) {
        return Err(Error::InvalidComparison(format!(
            "supports [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}] do not overlap"
        )));
    }
    let mut grid: Vec<f64> = a
        .omega
        .iter()
        .chain(&b.omega)
        .copied()
        .filter(|w| *w >= lo && *w <= hi)
        .chain([lo, hi])
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let sample = |s: &Spectrum| -> Result<Vec<f64>> {
        let v: Vec<f64> = grid.iter().map(|&w| s.interpolate(w)).collect();
        let area = trapezoid(&grid, &v);
        if !(area > 0.0) {
            return Err(Error::DegenerateSpectrum);
        }
        Ok(v.into_iter().map(|x| x / area).collect())
    };
    let va = sample(a)?;
    let vb = sample(b)?;
    let diff: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).collect();
    let argmax = |v: &[f64]| (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap_or(0);
    Ok(SpectrumComparison {
        l1: trapezoid(&grid, &diff),
        linf: diff.iter().copied().fold(0.0, f64::max),
        peak_shift: grid[argmax(&vb)] - grid[argmax(&va)],
        overlap: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(omega: Vec<f64>, values: Vec<f64>) -> Spectrum {
        Spectrum::new(omega, values, Provenance::Derived { note: "test".into() }).unwrap()
    }

    fn lorentzian(center: f64, width: f64) -> Spectrum {
        let omega: Vec<f64> = (0..=800).map(|i| 80.0 + 0.05 * i as f64).collect();
        let values = omega.iter().map(|w| 1.0 / (1.0 + (2.0 * (w - center) / width).powi(2))).collect();
        spec(omega, values)
    }

    #[test]
    fn constant_spectrum_normalizes_to_inverse_span() {
        let omega: Vec<f64> = (0..=40).map(|i| 80.0 + i as f64).collect();
        let s = normalize_spectrum(&spec(omega, vec![3.0; 41])).unwrap();
        assert!(s.normalized);
        for v in &s.values {
            assert_relative_eq!(*v, 1.0 / 40.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_spectrum_is_degenerate() {
        let s = spec(vec![1.0, 2.0, 3.0], vec![0.0; 3]);
        assert!(matches!(normalize_spectrum(&s), Err(Error::DegenerateSpectrum)));
    }

    #[test]
    fn rejects_malformed_spectra() {
        let p = Provenance::InitialState;
        assert!(Spectrum::new(vec![1.0, 1.0], vec![0.0, 1.0], p.clone()).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![-1.0, 1.0], p.clone()).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![1.0], p).is_err());
    }

    #[test]
    fn identical_spectra_compare_to_zero() {
        let a = normalize_spectrum(&lorentzian(100.0, 3.0)).unwrap();
        let m = compare_spectra(&a, &a).unwrap();
        assert!(m.l1 < 1e-15 && m.linf < 1e-15 && m.peak_shift == 0.0);
    }

    #[test]
    fn disjoint_bumps_have_l1_two() {
        let omega: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let mut va = vec![0.0; 11];
        let mut vb = vec![0.0; 11];
        va[2] = 1.0;
        vb[7] = 1.0;
        let a = normalize_spectrum(&spec(omega.clone(), va)).unwrap();
        let b = normalize_spectrum(&spec(omega, vb)).unwrap();
        let m = compare_spectra(&a, &b).unwrap();
        assert_relative_eq!(m.l1, 2.0, epsilon = 1e-12);
        assert_relative_eq!(m.peak_shift, 5.0);
    }

    #[test]
    fn disjoint_supports_are_rejected() {
        let a = spec(vec![1.0, 2.0], vec![1.0, 1.0]);
        let b = spec(vec![3.0, 4.0], vec![1.0, 1.0]);
        assert!(matches!(compare_spectra(&a, &b), Err(Error::InvalidComparison(_))));
    }

    #[test]
    fn comparison_handles_different_grids() {
        let fine = lorentzian(100.0, 4.0);
        let coarse_omega: Vec<f64> = (0..=80).map(|i| 80.0 + 0.5 * i as f64).collect();
        let coarse = spec(
            coarse_omega.clone(),
            coarse_omega.iter().map(|w| 1.0 / (1.0 + (2.0 * (w - 100.0) / 4.0).powi(2))).collect(),
        );
        let m = compare_spectra(&normalize_spectrum(&fine).unwrap(), &normalize_spectrum(&coarse).unwrap()).unwrap();
        assert!(m.l1 < 0.01, "{}", m.l1);
    }

    #[test]
    fn peaks_minima_and_widths() {
        let omega: Vec<f64> = (0..=800).map(|i| 80.0 + 0.05 * i as f64).collect();
        let values: Vec<f64> = omega
            .iter()
            .map(|w| {
                1.0 / (1.0 + (2.0 * (w - 90.0) / 2.0).powi(2)) + 0.5 / (1.0 + (2.0 * (w - 110.0) / 1.0).powi(2))
            })
            .collect();
        let s = spec(omega, values);
        let peaks = s.local_maxima(0.1);
        assert_eq!(peaks.len(), 2);
        assert!((s.omega[peaks[0]] - 90.0).abs() < 0.06);
        assert!((s.omega[peaks[1]] - 110.0).abs() < 0.06);
        assert!((s.peak_fwhm(peaks[0]).unwrap() - 2.0).abs() < 0.05);
        assert!((s.peak_fwhm(peaks[1]).unwrap() - 1.0).abs() < 0.05);
        let minima = s.local_minima(0.01);
        assert_eq!(minima.len(), 1);
        assert!(s.omega[minima[0]] > 90.0 && s.omega[minima[0]] < 110.0);
    }

    #[test]
    fn dip_width_of_inverted_lorentzian() {
        let omega: Vec<f64> = (0..=800).map(|i| 80.0 + 0.05 * i as f64).collect();
        let values: Vec<f64> = omega
            .iter()
            .map(|w| {
                let d = (w - 100.0) / 1.5;
                let envelope = (-((w - 100.0) / 15.0).powi(2)).exp();
                envelope * d * d / (1.0 + d * d)
            })
            .collect();
        let s = spec(omega, values);
        let minima = s.local_minima(0.01);
        assert_eq!(minima.len(), 1);
        let w = s.dip_width(minima[0]).unwrap();
        assert!(w > 2.5 && w < 3.5, "{w}");
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent_and_scale_free(lambda in 1e-6f64..1e6, center in 85.0f64..115.0) {
            let s = lorentzian(center, 2.5);
            let once = normalize_spectrum(&s).unwrap();
            let twice = normalize_spectrum(&once).unwrap();
            prop_assert!((once.area() - 1.0).abs() < 1e-9);
            let scaled = Spectrum { values: s.values.iter().map(|v| v * lambda).collect(), ..s.clone() };
            let from_scaled = normalize_spectrum(&scaled).unwrap();
            for ((a, b), c) in once.values.iter().zip(&twice.values).zip(&from_scaled.values) {
                prop_assert!((a - b).abs() < 1e-12 * a.max(1e-3));
                prop_assert!((a - c).abs() < 1e-12 * a.max(1e-3));
            }
        }
    }
}
