use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid multi-index {entries:?} for complex dimension {n}")]
    InvalidMultiIndex { entries: Vec<usize>, n: usize },

    #[error("invalid bidegree ({p},{q}) for complex dimension {n}")]
    InvalidBidegree { p: usize, q: usize, n: usize },

    #[error("bidegree mismatch: expected {expected}, found {found}")]
    BidegreeMismatch { expected: String, found: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coefficient is not differentiable in analytic mode")]
    NotDifferentiable,

    #[error("top density requires bidegree ({n},{n}), found {found}")]
    NotTopDegree { n: usize, found: String },

    #[error("degenerate domain parameters: {0}")]
    DegenerateDomain(String),

    #[error("point is not on the boundary (|r| = {0:e})")]
    OffBoundary(f64),

    #[error("point is not interior to the domain (r = {0:e})")]
    NotInterior(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("kernel is singular at zeta = z")]
    Singular,

    #[error("test family is empty")]
    EmptyTestFamily,

    #[error("boundary frame is not a half-space frame (normal {0:?})")]
    NotHalfSpaceFrame(Vec<f64>),

    #[error("no admissible tau: {0}")]
    TauUnsatisfiable(String),

    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid field: {0}")]
    InvalidField(String),
}

pub type Result<T> = std::result::Result<T, Error>;
