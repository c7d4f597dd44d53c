use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// The certified error bound of a floating evaluation exceeds the caller's budget.
    #[error("precision loss: error bound {bound:e} exceeds tolerance {tolerance:e}")]
    PrecisionLoss { bound: f64, tolerance: f64 },

    /// A sign change expected from interlacing was not found.
    #[error("bracket failure at degree {degree}: {detail}")]
    BracketFailure { degree: usize, detail: String },

    /// Enclosures overlap, or a query point falls inside one; refine and retry.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
