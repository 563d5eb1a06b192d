use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("sign condition violated: alpha_L * alpha_R must be negative on [0,1] ({0})")]
    SignCondition(String),
    #[error("geometry is not bilinear-like G2 for the given gluing data: {0}")]
    NotBilinear(String),
    #[error("degree budget violated: {0}")]
    DegreeBudget(String),
    #[error("trace function not representable: {0}")]
    NotRepresentable(String),
    #[error("refined B-spline selection failed: {0}")]
    Selection(String),
    #[error("rank decision is ambiguous: {0}")]
    IndeterminateRank(String),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("expression parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
