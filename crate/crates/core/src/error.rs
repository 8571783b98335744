use thiserror::Error;

/// Errors raised by the numerical and geometric routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank deficient: smallest/largest singular value ratio {ratio:e} is below {tolerance:e}")]
    RankDeficient { ratio: f64, tolerance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("index {index} out of range for {len} blocks")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unsupported norm kind: {0}")]
    UnsupportedKind(String),

    #[error("norm is not polytopal; exact LP evaluation needs an L1 or LINF target")]
    NotPolytopal,

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for failures of an iterative numerical kernel (SVD, simplex).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::LpFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
