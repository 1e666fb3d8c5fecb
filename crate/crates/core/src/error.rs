use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes or windows do not line up, or an input violates a structural precondition.
    #[error("structural error: {0}")]
    Structural(String),

    /// A numeric parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An iterative method did not reach its tolerance.
    #[error("no convergence after {iterations} iterations: {context}")]
    Convergence { iterations: usize, context: String },

    /// The matrix (or function) is numerically singular.
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// `A*A` is a multiple of the identity, so `B = 0` and the Neumann machinery is bypassed.
    #[error("degenerate conditioning: A*A = {s} I")]
    Degenerate { s: f64 },

    /// A generator could not reach its target.
    #[error("generation failed: {0}")]
    Generation(String),

    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}
