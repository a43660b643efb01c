use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypergeometric series diverges at the requested point.
    #[error("divergence: {0}")]
    Divergence(String),

    /// The inputs violate a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points {i} and {j} coincide (distance {distance:e})")]
    CoincidentPoints { i: usize, j: usize, distance: f64 },

    /// Evaluation point coincides with a node of the configuration.
    #[error("evaluation point coincides with node {node}")]
    Singularity { node: usize },

    #[error("radius {radius} is within {window:e} of the unit sphere")]
    NearBoundary { radius: f64, window: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: point has norm {norm}, not on the unit sphere")]
    OffSphere {
        path: PathBuf,
        line: usize,
        norm: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by numeric arguments rather than malformed input.
    pub fn is_numeric_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Divergence(_)
                | Error::Precondition(_)
                | Error::CoincidentPoints { .. }
                | Error::Singularity { .. }
                | Error::NearBoundary { .. }
                | Error::OffSphere { .. }
                | Error::InsufficientData(_)
        )
    }
}
