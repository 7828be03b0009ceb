use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },

    #[error("unphysical covariance matrix: smallest symplectic eigenvalue {min_nu} < 1")]
    Unphysical { min_nu: f64 },

    #[error("covariance matrix is indefinite and its symplectic spectrum could not be resolved")]
    NotPositiveDefinite,

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid mode partition: {0}")]
    Partition(String),

    /// A parameter inequality does not hold; the message names it.
    #[error("parameter constraint violated: {0}")]
    Parameter(String),

    #[error("model undefined for these parameters: {0}")]
    Regime(String),

    #[error("covariance matrix does not match the no-switching protocol form: {0}")]
    ProtocolMismatch(String),

    #[error("internal numerical error: {0}")]
    Internal(String),
}
