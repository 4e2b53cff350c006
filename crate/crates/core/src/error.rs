use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped by the layer that raises them; the CLI maps
/// [`Error::Solver`] to its solver-failure exit code and everything else to a
/// validation failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 1, 2 or 3)")]
    Dimension(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("synthesis requires a hermitian coefficient table")]
    NotHermitian,

    #[error("grid size {n} is invalid: {reason}")]
    GridSize { n: usize, reason: String },

    #[error("invalid operator: {0}")]
    Operator(String),

    #[error("frequency {k} lies outside the precomputed range |k| <= {max}")]
    OutOfRange { k: String, max: i64 },

    #[error("radial profile is not positive definite: coefficient {index} = {value:e} at eps = {eps}")]
    NotPositiveDefinite { index: i64, value: f64, eps: f64 },

    #[error("invalid innovations: {0}")]
    Innovations(String),

    #[error("weights violate the annihilation system: residual {residual:e} > {threshold:e}")]
    Annihilation { residual: f64, threshold: f64 },

    #[error("invalid functional: {0}")]
    Functional(String),

    #[error("spatial sampling refused: {0}")]
    SamplingRefused(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid problem: {0}")]
    Problem(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for failures of the numerical solvers (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::Solver(_))
    }
}
