use thiserror::Error;

/// Errors raised by the numerical and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} is outside the domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// The min-max objective could not be evaluated at a coarse-grid point.
    #[error("objective is not finite at alpha = {alpha} (p1 = {p1}, p2 = {p2})")]
    NonFiniteObjective { alpha: f64, p1: f64, p2: f64 },
    /// An error counter would have wrapped.
    #[error("error counter overflow after {trials} trials")]
    CounterOverflow { trials: u64 },
    /// A sweep was requested over an empty parameter list.
    #[error("empty {0} grid")]
    EmptyGrid(&'static str),
    /// The worker pool could not be constructed.
    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
