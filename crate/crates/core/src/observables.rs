//! Field-space diagnostics: the complex field amplitude `T(r)`, normally
//! ordered correlation functions, energy density, and recovery of mode
//! amplitudes from spatial data.
//!
//! `T(r) = sum_n sqrt(omega_n / L) sin(k_n r) c_n`. In the one-excitation
//! sector every second-order field correlation is built from it:
//!
//! * `<:E(r1)E(r2):> = T*(r1)T(r2) + T(r1)T*(r2)`
//! * `<:B(r1)B(r2):> = T*(r1)T(r2) - T*(r2)T(r1)`
//! * `W(r1, r2) = T*(r1)T(r2)` (their sum over two)
//!
//! Integrals use the composite trapezoid rule on a uniform grid that
//! includes both mirrors. For unfiltered data this is exact up to rounding
//! whenever the grid has more intervals than retained modes, because the
//! discrete sine functions stay orthogonal.

use num_complex::Complex64;

use crate::basis::ModeBasis;
use crate::error::{invalid, Error, Result};
use crate::state::SingleExcitationState;

/// Reference mode used when recovering amplitudes from `W` must carry at
/// least this fraction of the largest mode power.
pub const REFERENCE_FLOOR: f64 = 1e-12;

/// Uniform samples of `[0, L]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    points: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(length: f64, n_points: usize) -> Result<Self> {
        if !(length > 0.0) || n_points < 2 {
            return Err(invalid("grid needs a positive length and at least two points"));
        }
        let h = length / (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points).map(|i| i as f64 * h).collect();
        points[n_points - 1] = length;
        Ok(Self { length, points })
    }

    /// Grid with `samples_per_mode * N_mode` intervals.
    pub fn for_basis(basis: &ModeBasis, samples_per_mode: usize) -> Result<Self> {
        let grid = Self::new(basis.length(), samples_per_mode * basis.len() + 1)?;
        grid.check_resolves(basis)?;
        Ok(grid)
    }

    /// At least four samples per shortest retained half-wavelength.
    pub fn check_resolves(&self, basis: &ModeBasis) -> Result<()> {
        if self.points.len() < 4 * basis.len() {
            return Err(invalid(format!(
                "grid of {} points cannot resolve {} modes (need >= {})",
                self.points.len(),
                basis.len(),
                4 * basis.len()
            )));
        }
        if (self.length - basis.length()).abs() > 1e-12 * basis.length() {
            return Err(invalid("grid and basis lengths differ"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.points.len() - 1) as f64
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.points.len()];
        w[0] = h / 2.0;
        *w.last_mut().unwrap() = h / 2.0;
        w
    }
}

/// Calls `f(index, sin(k_n r))` for every mode. Uses a rotation recurrence
/// reseeded every 32 modes; accurate to a few ulps times the mode count.
fn for_each_mode_sine(basis: &ModeBasis, r: f64, mut f: impl FnMut(usize, f64)) {
    let theta = std::f64::consts::PI * (r / basis.length());
    let step = Complex64::from_polar(1.0, theta);
    let mut z = Complex64::new(0.0, 0.0);
    for n in 0..basis.len() {
        if n % 32 == 0 {
            let (s, c) = ((n + 1) as f64 * theta).sin_cos();
            z = Complex64::new(c, s);
        } else {
            z *= step;
        }
        f(n, z.im);
    }
}

/// `T(r)` from the mode amplitudes; atom amplitudes do not enter.
pub fn eval_t(state: &SingleExcitationState, basis: &ModeBasis, r: f64) -> Complex64 {
    state
        .modes
        .iter()
        .enumerate()
        .map(|(n, c)| c * (basis.field_weight(n) * basis.mode_function(n, r)))
        .sum()
}

/// `T` sampled on every grid point.
pub fn t_field(state: &SingleExcitationState, basis: &ModeBasis, grid: &SpatialGrid) -> Vec<Complex64> {
    let weighted: Vec<Complex64> = state
        .modes
        .iter()
        .enumerate()
        .map(|(n, c)| c * basis.field_weight(n))
        .collect();
    grid.points()
        .iter()
        .map(|&r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for_each_mode_sine(basis, r, |n, s| acc += weighted[n] * s);
            acc
        })
        .collect()
}

pub fn corr_e(state: &SingleExcitationState, basis: &ModeBasis, r1: f64, r2: f64) -> f64 {
    let (t1, t2) = (eval_t(state, basis, r1), eval_t(state, basis, r2));
    (t1.conj() * t2 + t1 * t2.conj()).re
}

pub fn corr_b(state: &SingleExcitationState, basis: &ModeBasis, r1: f64, r2: f64) -> Complex64 {
    let (t1, t2) = (eval_t(state, basis, r1), eval_t(state, basis, r2));
    t1.conj() * t2 - t2.conj() * t1
}

/// Normally ordered energy density `|T(r)|^2`.
pub fn energy_density(state: &SingleExcitationState, basis: &ModeBasis, r: f64) -> f64 {
    eval_t(state, basis, r).norm_sqr()
}

pub fn energy_density_profile(state: &SingleExcitationState, basis: &ModeBasis, grid: &SpatialGrid) -> Vec<f64> {
    t_field(state, basis, grid).iter().map(|t| t.norm_sqr()).collect()
}

/// `W(r_i, r_j)` sampled on a grid, stored row-major.
#[derive(Debug, Clone)]
pub struct CorrelationField {
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl CorrelationField {
    /// Outer product `conj(a_i) b_j`.
    pub fn from_outer(grid: SpatialGrid, a: &[Complex64], b: &[Complex64], time: f64) -> Self {
        let mut values = Vec::with_capacity(a.len() * b.len());
        for x in a {
            let xc = x.conj();
            values.extend(b.iter().map(|y| xc * y));
        }
        Self { grid, values, time }
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n() + j]
    }

    /// `<:E(r_i)E(r_j):> = 2 Re W`.
    pub fn e_view(&self, i: usize, j: usize) -> f64 {
        2.0 * self.get(i, j).re
    }

    /// `<:B(r_i)B(r_j):> = 2i Im W`.
    pub fn b_view(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.get(i, j).im)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i).re).collect()
    }

    /// `max |W_ij - conj(W_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

pub fn corr_w(state: &SingleExcitationState, basis: &ModeBasis, grid: &SpatialGrid) -> CorrelationField {
    let t = t_field(state, basis, grid);
    CorrelationField::from_outer(grid.clone(), &t, &t, state.time)
}

/// `c_m = 2 / sqrt(omega_m L) * int sin(k_m r) f(r) dr` for sampled `f`.
pub fn project_onto_modes(values: &[Complex64], basis: &ModeBasis, grid: &SpatialGrid) -> Vec<Complex64> {
    let weights = grid.trapezoid_weights();
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    for ((&r, w), f) in grid.points().iter().zip(&weights).zip(values) {
        if *f == Complex64::new(0.0, 0.0) {
            continue;
        }
        let fw = f * *w;
        for_each_mode_sine(basis, r, |n, s| out[n] += fw * s);
    }
    for (n, c) in out.iter_mut().enumerate() {
        *c *= 2.0 / (basis.frequency(n) * basis.length()).sqrt();
    }
    out
}

/// Recovers the mode amplitudes from `T` on `grid`.
pub fn reconstruct_from_t(state: &SingleExcitationState, basis: &ModeBasis, grid: &SpatialGrid) -> Result<Vec<Complex64>> {
    grid.check_resolves(basis)?;
    Ok(project_onto_modes(&t_field(state, basis, grid), basis, grid))
}

/// Mode amplitudes recovered from a correlation kernel. The global phase is
/// fixed by making the reference mode real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedModes {
    pub amplitudes: Vec<Complex64>,
    /// Index of the reference mode.
    pub reference: usize,
}

impl ReconstructedModes {
    pub fn powers(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Generic double-integral route from `W` to `c_ref* c_p` and the resolved
/// amplitudes.
///
/// Mode 1 is the reference unless its power is below
/// [`REFERENCE_FLOOR`] times the largest mode power; then the mode with the
/// largest projection of the brightest row of `W` is promoted.
pub fn reconstruct_products_from_w(field: &CorrelationField, basis: &ModeBasis) -> Result<ReconstructedModes> {
    field.grid.check_resolves(basis)?;
    let n = field.n();
    let weights = field.grid.trapezoid_weights();
    let points = field.grid.points();
    let l = basis.length();

    // Row of products c_ref* c_q for a chosen reference mode.
    let products_for = |reference: usize| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let s = weights[i] * basis.mode_function(reference, points[i]);
            if s == 0.0 {
                continue;
            }
            let row = &field.values[i * n..(i + 1) * n];
            for (vj, w) in v.iter_mut().zip(row) {
                *vj += w * s;
            }
        }
        let v: Vec<Complex64> = v.iter().zip(&weights).map(|(x, w)| x * *w).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (j, vj) in v.iter().enumerate() {
            if *vj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for_each_mode_sine(basis, points[j], |q, s| out[q] += vj * s);
        }
        let w_ref = basis.frequency(reference);
        for (q, c) in out.iter_mut().enumerate() {
            *c *= 4.0 / (l * (w_ref * basis.frequency(q)).sqrt());
        }
        out
    };

    // The brightest row of W is T*(r_i) T(r), whose projection gives every
    // |c_q|^2 up to a common factor; that decides the reference mode.
    let brightest = (0..n)
        .max_by(|&a, &b| field.get(a, a).re.total_cmp(&field.get(b, b).re))
        .ok_or(Error::DegenerateField)?;
    if !(field.get(brightest, brightest).re > 0.0) {
        return Err(Error::DegenerateField);
    }
    let probe: Vec<Complex64> = (0..n).map(|j| field.get(brightest, j) * weights[j]).collect();
    let powers: Vec<f64> = project_raw(&probe, basis, points)
        .iter()
        .enumerate()
        .map(|(q, c)| c.norm_sqr() / basis.frequency(q))
        .collect();
    let max_power = powers.iter().copied().fold(0.0_f64, f64::max);
    if !(max_power > 0.0) {
        return Err(Error::DegenerateField);
    }
    let reference = if powers[0] >= REFERENCE_FLOOR * max_power {
        0
    } else {
        (0..powers.len()).max_by(|&a, &b| powers[a].total_cmp(&powers[b])).unwrap_or(0)
    };
    resolve_row(&products_for(reference), reference).ok_or(Error::DegenerateField)
}

fn project_raw(weighted: &[Complex64], basis: &ModeBasis, points: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (f, &r) in weighted.iter().zip(points) {
        for_each_mode_sine(basis, r, |q, s| out[q] += f * s);
    }
    out
}

/// Turns `c_ref* c_q` into `c_q` with `c_ref` real positive, or `None` when
/// the reference is below the floor.
fn resolve_row(row: &[Complex64], reference: usize) -> Option<ReconstructedModes> {
    let ref_power = row[reference].re;
    if !(ref_power > 0.0 && ref_power.is_finite()) {
        return None;
    }
    let max_power = row.iter().map(|p| p.norm_sqr() / ref_power).fold(0.0_f64, f64::max);
    if ref_power < REFERENCE_FLOOR * max_power {
        return None;
    }
    let scale = 1.0 / ref_power.sqrt();
    Some(ReconstructedModes {
        amplitudes: row.iter().map(|p| p * scale).collect(),
        reference,
    })
}

/// Separable route: given `c~_m = 2/sqrt(omega_m L) int sin(k_m r) g(r) T(r) dr`,
/// the products are `conj(c~_ref) c~_p`.
pub(crate) fn resolve_separable(projection: &[Complex64]) -> Result<ReconstructedModes> {
    let max_power = projection.iter().map(|c| c.norm_sqr()).fold(0.0_f64, f64::max);
    if !(max_power > 0.0) {
        return Err(Error::DegenerateField);
    }
    let reference = if projection[0].norm_sqr() >= REFERENCE_FLOOR * max_power {
        0
    } else {
        projection
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    let c_ref = projection[reference];
    let row: Vec<Complex64> = projection.iter().map(|c| c_ref.conj() * c).collect();
    resolve_row(&row, reference).ok_or(Error::DegenerateField)
}
