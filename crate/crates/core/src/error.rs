use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("argument out of domain: {0}")]
    Domain(String),
    /// The function has a pole at the requested argument.
    #[error("pole: {0}")]
    Pole(String),
    /// The requested quantity diverges.
    #[error("divergent: {0}")]
    Divergent(String),
    /// An iterative method did not reach its tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A model or grid parameter is invalid.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The zero-energy resonance `a * alpha = -1`, where the decay estimates do not apply.
    #[error("threshold resonance: a*alpha = -1 has a zero-energy resonance")]
    ThresholdResonance,
    /// A quadrature did not meet its error target.
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    /// A time integration produced non-finite values or otherwise broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
