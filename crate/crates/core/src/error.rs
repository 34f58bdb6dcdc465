use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("eigen index {index} exceeds cache truncation {n_max}")]
    IndexOutOfRange { index: usize, n_max: usize },

    #[error("phase {theta} sits on a propagator caustic (sin θ = 0)")]
    Caustic { theta: f64 },

    #[error("{what}: no convergence after {terms} terms (residual {residual:e} > tol {tol:e})")]
    NonConvergence {
        what: &'static str,
        terms: usize,
        residual: f64,
        tol: f64,
    },

    #[error("quadrature tolerance not met: estimate {error:e} > tol {tol:e}")]
    Quadrature { error: f64, tol: f64 },

    #[error("correlator {value} outside [-1, 1] beyond tolerance")]
    CorrelatorRange { value: f64 },

    #[error("grid too coarse: Richardson estimate {estimate:e} > tol {tol:e}")]
    GridTooCoarse { estimate: f64, tol: f64 },

    #[error("inconsistent Gram data (determinant {det:e})")]
    InconsistentGram { det: f64 },

    #[error("trajectory {seed} stopped at θ = {theta}: density below floor")]
    DensityFloor { seed: usize, theta: f64 },

    #[error("optimizer did not converge: {0}")]
    Optimizer(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("I/O error at {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Numeric failures (as opposed to bad inputs or I/O).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Quadrature { .. }
                | Error::CorrelatorRange { .. }
                | Error::GridTooCoarse { .. }
                | Error::DensityFloor { .. }
                | Error::Optimizer(_)
        )
    }

    /// Short stable code for machine-parsable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "INDEX_RANGE",
            Error::Caustic { .. } => "CAUSTIC",
            Error::NonConvergence { .. } => "NON_CONVERGENCE",
            Error::Quadrature { .. } => "QUADRATURE",
            Error::CorrelatorRange { .. } => "CORRELATOR_RANGE",
            Error::GridTooCoarse { .. } => "GRID_COARSE",
            Error::InconsistentGram { .. } => "GRAM",
            Error::DensityFloor { .. } => "DENSITY_FLOOR",
            Error::Optimizer(_) => "OPTIMIZER",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::Io { .. } => "IO",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
