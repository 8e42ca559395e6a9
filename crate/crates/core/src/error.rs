use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: series did not converge within {terms} terms")]
    Convergence { op: &'static str, terms: usize },
    #[error("{op}: pole or lattice point near {at}")]
    Pole { op: &'static str, at: Complex64 },
    #[error("{op}: degenerate parameters ({detail})")]
    Degenerate { op: &'static str, detail: String },
    #[error("{op}: argument {at} lies on a branch cut")]
    Cut { op: &'static str, at: Complex64 },
    #[error("{op}: invalid input ({detail})")]
    Domain { op: &'static str, detail: String },
    #[error("integration aborted at tau = {tau}: {reason}")]
    Integration { tau: Complex64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn degenerate(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Degenerate { op, detail: detail.into() }
}

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { op, detail: detail.into() }
}
