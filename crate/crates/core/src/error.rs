use thiserror::Error;

/// Errors raised by the expansion machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("vanishing denominator n - k = 0 at n = {n}, k = {k}")]
    VanishingDenominator { n: i64, k: i64 },

    #[error("parameters (d = {d}, k = {k}) are not in the {expected} regime")]
    WrongRegime { d: usize, k: usize, expected: &'static str },

    #[error("points coincide")]
    CoincidentPoints,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: String, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
