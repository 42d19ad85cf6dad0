use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{assemble_hamiltonian, CoupledHamiltonian};
use super::schedule::Schedule;
use crate::atom::AtomSpec;
use crate::basis::ModeBasis;
use crate::error::{invalid, Error, Result};
use crate::state::SingleExcitationState;

/// Largest `omega_max * h` allowed for the RK4 backend.
const RK4_PHASE_PER_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Exact exponential of each interval's Hamiltonian via its
    /// eigendecomposition.
    Eigen,
    /// Fixed-step classical Runge-Kutta with step-halving convergence check.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub backend: Backend,
    /// Accuracy target. For RK4 this bounds the change of any output
    /// amplitude under one step halving.
    pub tol: f64,
    /// Upper bound on the RK4 step; the effective step is also capped at
    /// `0.05 / omega_max`.
    pub dt_max: f64,
    pub max_halvings: u32,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Eigen,
            tol: 1e-8,
            dt_max: 1e-2,
            max_halvings: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub backend: Backend,
    pub intervals: usize,
    /// `max |N(t) - N(t0)| / max(t - t0, 1)` over all recorded instants.
    pub norm_drift_per_time: f64,
    /// Largest relative change of `<H>` within any fixed-activation interval.
    pub max_energy_drift: f64,
    /// Final RK4 step (after halving), if that backend was used.
    pub rk4_step: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<SingleExcitationState>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    /// The sample recorded at exactly `t`, if any.
    pub fn at(&self, t: f64) -> Option<&SingleExcitationState> {
        self.samples.iter().find(|s| s.time == t)
    }

    /// The sample closest to `t`.
    pub fn nearest(&self, t: f64) -> Option<&SingleExcitationState> {
        self.samples
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
    }

    pub fn last(&self) -> Option<&SingleExcitationState> {
        self.samples.last()
    }
}

/// Excitation probability of atom `j`.
pub fn atom_excitation(state: &SingleExcitationState, j: usize) -> Result<f64> {
    state.atom_excitation(j)
}

/// Solves `i dc/dt = H(t) c` from `state.time` to the schedule horizon, with
/// `H` held fixed between activation events, recording the state at every
/// sample time of `schedule`.
///
/// The map is linear, so unnormalized input is accepted; drift diagnostics
/// are relative to the input norm.
pub fn evolve(
    state: &SingleExcitationState,
    basis: &ModeBasis,
    atoms: &[AtomSpec],
    schedule: &Schedule,
    options: &EvolveOptions,
) -> Result<Trajectory> {
    if state.modes.len() != basis.len() || state.atoms.len() != atoms.len() {
        return Err(invalid(format!(
            "state has {} modes / {} atoms, system has {} / {}",
            state.modes.len(),
            state.atoms.len(),
            basis.len(),
            atoms.len()
        )));
    }
    if state.time != schedule.t_start() {
        return Err(invalid(format!(
            "state time {} does not match schedule start {}",
            state.time,
            schedule.t_start()
        )));
    }
    for a in atoms {
        a.validate_in(basis)?;
    }
    if !(options.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }

    let nm = basis.len();
    let t0 = schedule.t_start();
    let norm0 = state.norm_sqr();
    let mut x: Vec<Complex64> = state.modes.iter().chain(&state.atoms).copied().collect();
    let mut samples = Vec::with_capacity(schedule.samples().len());
    let mut norm_drift = 0.0_f64;
    let mut energy_drift = 0.0_f64;
    let mut rk4_step = None;

    let to_state = |v: &[Complex64], t: f64| SingleExcitationState::new(v[..nm].to_vec(), v[nm..].to_vec(), t);
    let mut track_norm = |v: &[Complex64], t: f64| {
        let n: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        norm_drift = norm_drift.max((n - norm0).abs() / (t - t0).max(1.0));
    };

    let mut pending = schedule.samples().iter().copied().peekable();
    while let Some(&t) = pending.peek() {
        if t > t0 {
            break;
        }
        samples.push(to_state(&x, t));
        pending.next();
    }

    let intervals = schedule.intervals();
    for &(a, b) in &intervals {
        if b <= a {
            continue;
        }
        let ham = assemble_hamiltonian(basis, atoms, a);
        let start = to_state(&x, a);
        let e_start = ham.expectation(&start);
        let e_scale = e_start.abs().max(f64::MIN_POSITIVE);

        let mut targets: Vec<f64> = Vec::new();
        while let Some(&t) = pending.peek() {
            if t > b {
                break;
            }
            targets.push(t);
            pending.next();
        }
        let n_samples = targets.len();
        if targets.last() != Some(&b) {
            targets.push(b);
        }

        let outputs = match options.backend {
            Backend::Eigen => EigenInterval::new(&ham, &x, a).states_at(&targets),
            Backend::Rk4 => {
                let (out, h) = rk4_interval(&ham, &x, a, &targets, options)?;
                rk4_step = Some(rk4_step.map_or(h, |p: f64| p.min(h)));
                out
            }
        };

        for (i, (t, v)) in targets.iter().zip(&outputs).enumerate() {
            track_norm(v, *t);
            let s = to_state(v, *t);
            energy_drift = energy_drift.max((ham.expectation(&s) - e_start).abs() / e_scale);
            if i < n_samples {
                samples.push(s);
            }
        }
        x = outputs.into_iter().last().expect("interval end is always a target");
    }

    Ok(Trajectory {
        samples,
        diagnostics: Diagnostics {
            backend: options.backend,
            intervals: intervals.len(),
            norm_drift_per_time: norm_drift,
            max_energy_drift: energy_drift,
            rk4_step,
        },
    })
}

/// Exact propagator `exp(-i H (t - t_a))` on one interval.
///
/// Inactive atoms are decoupled and only pick up a phase, so the
/// eigendecomposition is restricted to the modes plus active atoms.
struct EigenInterval {
    t_a: f64,
    coupled: Vec<usize>,
    free: Vec<(usize, f64, Complex64)>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
    y_re: DVector<f64>,
    y_im: DVector<f64>,
    dim: usize,
}

impl EigenInterval {
    fn new(ham: &CoupledHamiltonian, x: &[Complex64], t_a: f64) -> Self {
        let nm = ham.n_modes();
        let mut coupled: Vec<usize> = (0..nm).collect();
        let mut free = Vec::new();
        for j in 0..ham.n_atoms() {
            if ham.is_active(j) {
                coupled.push(nm + j);
            } else {
                free.push((nm + j, ham.atom_frequencies()[j], x[nm + j]));
            }
        }
        let m = coupled.len();
        let mut h = DMatrix::<f64>::zeros(m, m);
        for (i, w) in ham.mode_frequencies().iter().enumerate() {
            h[(i, i)] = *w;
        }
        for (block, &flat) in coupled.iter().enumerate().skip(nm) {
            let j = flat - nm;
            h[(block, block)] = ham.atom_frequencies()[j];
            for (n, g) in ham.coupling_row(j).iter().enumerate() {
                h[(block, n)] = *g;
                h[(n, block)] = *g;
            }
        }
        let eig = SymmetricEigen::new(h);
        let x_re = DVector::from_iterator(m, coupled.iter().map(|&i| x[i].re));
        let x_im = DVector::from_iterator(m, coupled.iter().map(|&i| x[i].im));
        let y_re = eig.eigenvectors.tr_mul(&x_re);
        let y_im = eig.eigenvectors.tr_mul(&x_im);
        Self {
            t_a,
            coupled,
            free,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
            y_re,
            y_im,
            dim: x.len(),
        }
    }

    fn state_at(&self, t: f64) -> Vec<Complex64> {
        let dt = t - self.t_a;
        let m = self.coupled.len();
        let mut z_re = DVector::zeros(m);
        let mut z_im = DVector::zeros(m);
        for k in 0..m {
            let (s, c) = (self.energies[k] * dt).sin_cos();
            // (y_re + i y_im)(c - i s)
            z_re[k] = self.y_re[k] * c + self.y_im[k] * s;
            z_im[k] = self.y_im[k] * c - self.y_re[k] * s;
        }
        let out_re = &self.vectors * z_re;
        let out_im = &self.vectors * z_im;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (k, &flat) in self.coupled.iter().enumerate() {
            out[flat] = Complex64::new(out_re[k], out_im[k]);
        }
        for &(flat, w, c) in &self.free {
            out[flat] = c * Complex64::from_polar(1.0, -w * dt);
        }
        out
    }

    fn states_at(&self, targets: &[f64]) -> Vec<Vec<Complex64>> {
        targets.iter().map(|&t| self.state_at(t)).collect()
    }
}

fn rk4_interval(
    ham: &CoupledHamiltonian,
    x: &[Complex64],
    t_a: f64,
    targets: &[f64],
    options: &EvolveOptions,
) -> Result<(Vec<Vec<Complex64>>, f64)> {
    let mut h = options.dt_max.min(RK4_PHASE_PER_STEP / ham.max_frequency().max(f64::MIN_POSITIVE));
    let mut coarse = rk4_run(ham, x, t_a, targets, h);
    for _ in 0..options.max_halvings {
        let fine = rk4_run(ham, x, t_a, targets, h / 2.0);
        let change = coarse
            .iter()
            .zip(&fine)
            .flat_map(|(c, f)| c.iter().zip(f).map(|(a, b)| (a - b).norm()))
            .fold(0.0_f64, f64::max);
        h /= 2.0;
        if change <= options.tol {
            return Ok((fine, h));
        }
        coarse = fine;
    }
    Err(Error::StepSizeFailure {
        t_start: t_a,
        t_end: *targets.last().unwrap_or(&t_a),
        detail: format!(
            "step-halving did not reach tol {} after {} halvings (step {h:e})",
            options.tol, options.max_halvings
        ),
    })
}

fn rk4_run(ham: &CoupledHamiltonian, x0: &[Complex64], t_a: f64, targets: &[f64], h_max: f64) -> Vec<Vec<Complex64>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let minus_i = Complex64::new(0.0, -1.0);
    let deriv = |v: &[Complex64], out: &mut [Complex64]| {
        ham.apply(v, out);
        out.iter_mut().for_each(|o| *o *= minus_i);
    };

    let mut t = t_a;
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / h_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                deriv(&x, &mut k1);
                for i in 0..n {
                    tmp[i] = x[i] + k1[i] * (h / 2.0);
                }
                deriv(&tmp, &mut k2);
                for i in 0..n {
                    tmp[i] = x[i] + k2[i] * (h / 2.0);
                }
                deriv(&tmp, &mut k3);
                for i in 0..n {
                    tmp[i] = x[i] + k3[i] * h;
                }
                deriv(&tmp, &mut k4);
                for i in 0..n {
                    x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
                }
            }
            t = target;
        }
        out.push(x.clone());
    }
    out
}
