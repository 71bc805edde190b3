//! Photon-blockade simulation of a driven four-level emitter in a lossy cavity.

pub mod error;
pub mod hilbert;
pub mod model;
pub mod solvers;
pub mod sweep;
pub mod transmission;

pub use error::{Error, Result};
