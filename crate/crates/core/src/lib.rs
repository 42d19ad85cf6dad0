//! Single-excitation light in a one-dimensional cavity, coupled to two-level
//! atoms, with two independent local-spectrum measurements: banks of weakly
//! coupled analyzer atoms and spatially filtered field correlations.
//!
//! Natural units throughout (`c = hbar = eps0 = mu0 = 1`), so angular
//! frequency and wavenumber coincide.

// `!(x > 0.0)` checks deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod basis;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod observables;
pub mod scenarios;
pub mod spectra;
pub mod state;

pub use atom::{Activation, AtomRole, AtomSpec};
pub use basis::ModeBasis;
pub use error::{Error, Result};
pub use state::{normalize, SingleExcitationState};
pub use experiment::{prepare, run_experiment, ExperimentResult};
pub use scenarios::{parse_experiment, render_experiment, scenario_by_name, ExperimentSpec};
