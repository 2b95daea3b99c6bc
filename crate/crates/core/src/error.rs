use nonnormal_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix size {n} must exceed the band width {d}")]
    TooSmall { n: usize, d: usize },
    #[error("degenerate symbol: effective degree 0")]
    DegenerateSymbol,
    #[error("leading transfer coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("z lies within {distance:e} of the symbol curve")]
    NearSingularity { distance: f64 },
    #[error("{refused} quadrature panels refused near f0(x) = z (limit {limit})")]
    TooManyRefusedPanels { refused: usize, limit: usize },
    #[error("singular transfer matrix at step {index}")]
    SingularTransfer { index: usize },
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("input not sorted ascending at position {0}")]
    Unsorted(usize),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
