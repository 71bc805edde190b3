use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::solvers::{g2_zero, mean_photon, steady_state_for};

/// Smallest truncation tried.
pub const START_FOCK: usize = 4;
/// Largest truncation tried.
pub const MAX_FOCK: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceObservable {
    G2,
    NPhoton,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Convergence {
    /// First truncation whose value changes by less than the tolerance when
    /// one more Fock state is added.
    pub n_fock: usize,
    pub value: f64,
}

pub fn observable_at(config: &SystemConfig, observable: ConvergenceObservable) -> Result<f64> {
    let ss = steady_state_for(config)?;
    match observable {
        ConvergenceObservable::G2 => g2_zero(&ss.rho),
        ConvergenceObservable::NPhoton => Ok(mean_photon(&ss.rho)),
    }
}

/// Grows the Fock space from [`START_FOCK`] until consecutive truncations
/// agree to relative tolerance `tol`.
pub fn fock_convergence(
    config: &SystemConfig,
    observable: ConvergenceObservable,
    tol: f64,
) -> Result<Convergence> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let at = |n_fock: usize| {
        let mut c = config.clone();
        c.n_fock = n_fock;
        observable_at(&c, observable)
    };
    let mut previous = at(START_FOCK)?;
    if tol.is_infinite() {
        return Ok(Convergence { n_fock: START_FOCK, value: previous });
    }
    let mut last_change = f64::INFINITY;
    for n_fock in START_FOCK + 1..=MAX_FOCK {
        let value = at(n_fock)?;
        last_change = (value - previous).abs() / value.abs().max(f64::MIN_POSITIVE);
        if last_change < tol {
            return Ok(Convergence { n_fock: n_fock - 1, value: previous });
        }
        previous = value;
    }
    Err(Error::TruncationNotConverged { max_fock: MAX_FOCK, last_change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::from_ghz;
    use num_complex::Complex64 as C64;

    #[test]
    fn weakly_driven_empty_cavity_converges_immediately() {
        let mut c = SystemConfig::resonant(from_ghz(3.0));
        c.g_eg = 0.0;
        c.g_fs = 0.0;
        c.omega_rabi = C64::new(0.0, 0.0);
        // ⟨n⟩ = (0.1/3)² ≈ 1.1e-3; cutting at three photons shifts it by ~⟨n⟩³
        let conv = fock_convergence(&c, ConvergenceObservable::NPhoton, 1e-6).unwrap();
        assert_eq!(conv.n_fock, START_FOCK);
        assert!((conv.value * 900.0 - 1.0).abs() < 1e-8, "{}", conv.value);
    }

    #[test]
    fn infinite_tolerance_returns_start() {
        let c = SystemConfig::default();
        let conv = fock_convergence(&c, ConvergenceObservable::G2, f64::INFINITY).unwrap();
        assert_eq!(conv.n_fock, START_FOCK);
        assert!(fock_convergence(&c, ConvergenceObservable::G2, 0.0).is_err());
    }
}
