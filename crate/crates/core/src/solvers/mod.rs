//! Steady states, time propagation, photon statistics and dressed-state spectra.

mod convergence;
mod evolve;
mod observables;
mod spectrum;
mod steady;

pub use convergence::{fock_convergence, observable_at, Convergence, ConvergenceObservable, MAX_FOCK, START_FOCK};
pub use evolve::{suggested_step, time_evolve, Evolution, INSTABILITY_DRIFT};
pub use observables::{g2_zero, mean_photon, MIN_PHOTONS};
pub use spectrum::{
    dressed_energies, eig_complex, manifold_matrix, sort_eigenvalues, ManifoldMatrix, SpectrumResult,
    MAX_EIG_DIM,
};
pub use steady::{steady_state, steady_state_for, steady_state_with, SteadyMethod, SteadyState, RESIDUAL_TOL};
