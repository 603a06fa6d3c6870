use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("classification not applicable: {0}")]
    InapplicableClassification(String),

    #[error("period map lost positivity (min = {min:.3e}); increase n_t above {n_t}")]
    StepSize { min: f64, n_t: usize },

    #[error("power iteration did not converge in {iterations} periods (last mu iterates {previous:.12} and {last:.12})")]
    NonConvergence {
        iterations: usize,
        previous: f64,
        last: f64,
    },

    #[error("trial function must be strictly positive (min = {0:.3e})")]
    Domain(f64),

    #[error("dispersion structure: {0}")]
    Structure(String),

    #[error("speed {speed} is below the minimal speed {c_star}")]
    Ordering { speed: f64, c_star: f64 },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("stability: {reason}; try dt <= {suggested_dt:.3e}")]
    Stability { reason: String, suggested_dt: f64 },

    #[error("no front crossing at level {level}")]
    FrontAbsent { level: f64 },

    #[error("need at least {needed} samples in the fit window, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
