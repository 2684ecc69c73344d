use thiserror::Error;

/// Errors raised by field construction, integration, and the verification suites.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric parameter is outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    Parameter(String),

    /// A point handed to an evaluator is not interior to the orthant.
    #[error("point outside the open domain: {0}")]
    Domain(String),

    /// The requested operation needs something the input does not carry
    /// (an exact form, a support box, a wall factor).
    #[error("capability missing: {0}")]
    Capability(String),

    /// An integrand produced a non-finite value at a quadrature node.
    #[error("non-finite integrand value at node {node:?}")]
    Evaluation { node: Vec<f64> },

    /// Order doubling moved a quadrature result by more than the allowed amount.
    #[error("quadrature did not converge: {what} changed by {rel_change:e} under order doubling")]
    Convergence { what: String, rel_change: f64 },

    /// A ratio or optimal parameter is undefined for this input.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The outer one-dimensional search failed to agree with itself.
    #[error("optimization failed: {0}")]
    Optimization(String),

    /// A Gram matrix is numerically rank deficient.
    #[error("ill-conditioned Gram matrix (condition {0:e})")]
    Conditioning(f64),

    /// Unknown catalogue entry or malformed field description.
    #[error("catalog: {0}")]
    Catalog(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
