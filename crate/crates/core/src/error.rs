use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field mean {mean:e} is not negligible against max |value| {max:e}")]
    NonZeroMean { mean: f64, max: f64 },

    #[error("query point ({r}, {z}) lies within one cell of the support")]
    PointOnSupport { r: f64, z: f64 },

    #[error("field is not polarized: value {value:e} on the right half-plane")]
    NotPolarized { value: f64 },

    #[error("grid with n = {n} exceeds the pairwise-sum cap of {cap}")]
    GridTooLarge { n: usize, cap: usize },

    #[error("field is not admissible for Nehari projection: {0}")]
    NotAdmissible(String),

    #[error("field is not on the Nehari manifold: relative E'(psi)(psi) = {residual:e}")]
    NotOnNehari { residual: f64 },

    #[error("backtracking underflowed at iteration {iteration} (energy {energy})")]
    NoDescentDirection { iteration: usize, energy: f64 },

    #[error("theta vanishes identically: trivial solution")]
    ZeroTheta,

    #[error("support margin {margin} is below the minimum {min}; enlarge the domain")]
    SupportTouchesBoundary { margin: f64, min: f64 },

    #[error("time step {dt} violates the advective limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("{location}: unknown key `{key}`")]
    UnknownKey { location: String, key: String },

    #[error("{location}: bad value for `{key}`: {msg}")]
    BadValue {
        location: String,
        key: String,
        msg: String,
    },

    #[error("{}: unsupported format (header `{header}`)", path.display())]
    UnsupportedFormat { path: PathBuf, header: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Errors caused by the invocation or its inputs rather than by a failed
    /// computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::UnknownKey { .. }
                | Error::BadValue { .. }
                | Error::UnsupportedFormat { .. }
                | Error::GridMismatch(_)
                | Error::CflViolation { .. }
                | Error::Io { .. }
                | Error::Json { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
