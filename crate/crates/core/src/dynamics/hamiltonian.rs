use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::atom::AtomSpec;
use crate::basis::ModeBasis;
use crate::state::SingleExcitationState;

/// Hamiltonian of the field plus atoms in the one-excitation sector, frozen
/// over an interval with a fixed activation pattern.
///
/// All matrix elements are real. The only off-diagonal entries couple atom
/// `j` to mode `n`: `-sqrt(omega_n / L) sin(k_n r_j) D_j` while the atom is
/// active.
#[derive(Debug, Clone)]
pub struct CoupledHamiltonian {
    mode_freqs: Vec<f64>,
    atom_freqs: Vec<f64>,
    /// Row-major `n_atoms x n_modes`.
    coupling: Vec<f64>,
    active: Vec<bool>,
    valid_interval: (f64, f64),
}

/// Builds the Hamiltonian in force at time `t`.
pub fn assemble_hamiltonian(basis: &ModeBasis, atoms: &[AtomSpec], t: f64) -> CoupledHamiltonian {
    let n_modes = basis.len();
    let mut coupling = vec![0.0; atoms.len() * n_modes];
    let mut active = Vec::with_capacity(atoms.len());
    for (j, atom) in atoms.iter().enumerate() {
        let on = atom.is_active(t);
        active.push(on);
        if !on {
            continue;
        }
        let reach = 10.0 * atom.gamma;
        if atom.omega0 - reach < basis.omega_min() || atom.omega0 + reach > basis.omega_max() {
            log::warn!(
                "atom {j} (omega0 = {}, gamma = {}) extends outside the retained band [{}, {}]",
                atom.omega0,
                atom.gamma,
                basis.omega_min(),
                basis.omega_max()
            );
        }
        let row = &mut coupling[j * n_modes..(j + 1) * n_modes];
        for (n, g) in row.iter_mut().enumerate() {
            *g = -basis.field_weight(n) * basis.mode_function(n, atom.position) * atom.dipole;
        }
    }

    let mut t_a = f64::NEG_INFINITY;
    let mut t_b = f64::INFINITY;
    for e in atoms.iter().flat_map(|a| a.events()) {
        if e <= t {
            t_a = t_a.max(e);
        } else {
            t_b = t_b.min(e);
        }
    }

    CoupledHamiltonian {
        mode_freqs: basis.frequencies().to_vec(),
        atom_freqs: atoms.iter().map(|a| a.bare_frequency()).collect(),
        coupling,
        active,
        valid_interval: (t_a, t_b),
    }
}

impl CoupledHamiltonian {
    pub fn n_modes(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.atom_freqs.len()
    }

    pub fn dim(&self) -> usize {
        self.n_modes() + self.n_atoms()
    }

    pub fn mode_frequencies(&self) -> &[f64] {
        &self.mode_freqs
    }

    pub fn atom_frequencies(&self) -> &[f64] {
        &self.atom_freqs
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.active[j]
    }

    pub fn valid_interval(&self) -> (f64, f64) {
        self.valid_interval
    }

    /// Matrix element between atom `j` and mode `n`.
    pub fn coupling(&self, j: usize, n: usize) -> f64 {
        self.coupling[j * self.n_modes() + n]
    }

    pub fn coupling_row(&self, j: usize) -> &[f64] {
        let n = self.n_modes();
        &self.coupling[j * n..(j + 1) * n]
    }

    pub fn max_frequency(&self) -> f64 {
        self.mode_freqs
            .iter()
            .chain(&self.atom_freqs)
            .fold(0.0_f64, |m, w| m.max(w.abs()))
    }

    /// `out = H x` in the flat `[modes..., atoms...]` ordering.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let nm = self.n_modes();
        let (xm, xa) = x.split_at(nm);
        let (om, oa) = out.split_at_mut(nm);
        for ((o, w), c) in om.iter_mut().zip(&self.mode_freqs).zip(xm) {
            *o = c * *w;
        }
        for (j, (o, w)) in oa.iter_mut().zip(&self.atom_freqs).enumerate() {
            *o = xa[j] * *w;
            if !self.active[j] {
                continue;
            }
            let row = self.coupling_row(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for ((g, c), m) in row.iter().zip(xm).zip(om.iter_mut()) {
                acc += c * *g;
                *m += xa[j] * *g;
            }
            *o += acc;
        }
    }

    /// `<psi|H|psi>`; equals the energy when the state is normalized.
    pub fn expectation(&self, state: &SingleExcitationState) -> f64 {
        let mut e: f64 = state
            .modes
            .iter()
            .zip(&self.mode_freqs)
            .map(|(c, w)| w * c.norm_sqr())
            .sum();
        for (j, (ca, w)) in state.atoms.iter().zip(&self.atom_freqs).enumerate() {
            e += w * ca.norm_sqr();
            if !self.active[j] {
                continue;
            }
            let cross: Complex64 = self
                .coupling_row(j)
                .iter()
                .zip(&state.modes)
                .map(|(g, c)| c * *g)
                .sum();
            e += 2.0 * (ca.conj() * cross).re;
        }
        e
    }

    /// Dense real symmetric matrix in the flat ordering.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let nm = self.n_modes();
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for (n, w) in self.mode_freqs.iter().enumerate() {
            h[(n, n)] = *w;
        }
        for (j, w) in self.atom_freqs.iter().enumerate() {
            h[(nm + j, nm + j)] = *w;
            if self.active[j] {
                for (n, g) in self.coupling_row(j).iter().enumerate() {
                    h[(nm + j, n)] = *g;
                    h[(n, nm + j)] = *g;
                }
            }
        }
        h
    }
}
