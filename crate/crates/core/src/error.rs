use alloc::string::String;

/// Errors raised by the numerical kernels and the layers built on them.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    #[error("{what} did not converge within {limit} steps")]
    NonConvergence { what: &'static str, limit: usize },

    #[error("invalid Hurst model: {0}")]
    InvalidModel(String),

    #[error("operation `{op}` is not supported for a {model} Hurst model")]
    UnsupportedModel {
        op: &'static str,
        model: &'static str,
    },

    #[error("covariance matrix is not positive definite (pivot {pivot}) after jitter escalation")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),

    #[error("{what} index {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("ensemble has {have} trajectories, need at least {need}")]
    EnsembleTooSmall { have: usize, need: usize },

    #[error("degenerate statistic: {0}")]
    Degenerate(&'static str),

    #[error("curve abscissas must be strictly increasing ({prev} then {next})")]
    NonMonotoneAbscissa { prev: f64, next: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
