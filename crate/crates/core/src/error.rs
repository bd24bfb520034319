use thiserror::Error;

/// Errors raised by the matrix-variate routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A parameter-domain condition was violated. The message names the inequality.
    #[error("parameter domain violated: {0}")]
    Domain(String),

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("missing zonal table entry for partition {0}")]
    MissingEntry(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Builds a [`Error::Domain`] unless `holds`, quoting the condition and the observed values.
pub(crate) fn require(holds: bool, condition: impl FnOnce() -> String) -> Result<()> {
    if holds {
        Ok(())
    } else {
        Err(Error::Domain(condition()))
    }
}
