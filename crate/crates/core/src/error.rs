use thiserror::Error;

/// Errors raised by the map, measure, sampling and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the range of branch {branch}")]
    OutOfRange { branch: usize, value: f64 },

    #[error("no 2-periodic point found in (0, c)")]
    NotFound,

    #[error("no closed-form invariant density for this map family ({0})")]
    NoClosedFormDensity(&'static str),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("quadrature did not reach tolerance {tol:e} (error estimate {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("series lost precision: error bound {bound:e} after {terms} terms")]
    PrecisionLoss { terms: usize, bound: f64 },

    #[error("Lamperti CDF forms disagree at t={t}: {closed} vs {integral}")]
    FormMismatch { t: f64, closed: f64, integral: f64 },

    #[error("orbit left the representable range at step {step}")]
    NumericEscape { step: u64 },

    #[error("rejection sampler stalled: acceptance rate {rate:e}")]
    RejectionStall { rate: f64 },

    #[error("rejection envelope violated at z={z}: density {density} > bound {bound}")]
    EnvelopeViolated { z: f64, density: f64, bound: f64 },

    #[error("level set {level} has zero measure")]
    EmptyLevel { level: u64 },

    #[error("expected event count {expected:.1} < {min} at n={n}; increase samples or decrease theta")]
    InsufficientEvents { n: u64, expected: f64, min: f64 },

    #[error("serialization failed: {0}")]
    Serialization(String),

    #[error("truncation budget exceeded: certified bound {bound:e} > target {target:e}")]
    BudgetExceeded { bound: f64, target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
