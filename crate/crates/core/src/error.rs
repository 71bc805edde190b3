use std::path::PathBuf;

use crate::hilbert::HilbertSpace;

/// Errors produced while building or solving a cavity model.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("operator spaces differ: {left} vs {right}")]
    SpaceMismatch {
        left: HilbertSpace,
        right: HilbertSpace,
    },

    #[error("level `{label}` is not part of a {n_atom}-level emitter")]
    UnknownLevel { label: String, n_atom: usize },

    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("steady state requires a positive cavity decay rate")]
    NoCavityDecay,

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("time evolution became unstable: trace drift {drift:e} at t = {time}")]
    Unstable { drift: f64, time: f64 },

    #[error("g2(0) is undefined for mean photon number {photons:e}")]
    UndefinedG2 { photons: f64 },

    #[error("manifold index must be 1 or 2, got {0}")]
    InvalidManifold(usize),

    #[error("eigenvalue solver did not converge: {0}")]
    NoConvergence(String),

    #[error("truncation did not converge by n_fock = {max_fock} (last change {last_change:e})")]
    TruncationNotConverged { max_fock: usize, last_change: f64 },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by the input (configuration, spec, files)
    /// rather than by a numerical method.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownLevel { .. }
                | Error::InvalidSpace(_)
                | Error::InvalidConfig(_)
                | Error::InvalidManifold(_)
                | Error::UnknownParameter(_)
                | Error::UnknownFigure(_)
                | Error::InvalidSweep(_)
                | Error::Io { .. }
                | Error::Json { .. }
                | Error::Csv { .. }
        )
    }
}
