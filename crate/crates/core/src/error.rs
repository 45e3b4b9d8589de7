use thiserror::Error;

/// Errors raised by the geometric and functional kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate input: affine hull has dimension {found} < {expected}")]
    DegenerateInput { expected: usize, found: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} outside the supported range 1..=6")]
    UnsupportedDimension(usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("intersection is empty")]
    EmptyIntersection,
    #[error("half-space system is unbounded")]
    Unbounded,
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("origin is not contained in the body")]
    OriginNotContained,
    #[error("section by the requested subspace is empty")]
    EmptySection,
    #[error("polygon is not centered at the origin")]
    NotCentered,
    #[error("polygon has {0} vertices, at least 4 are required")]
    TooFewVertices(usize),
    #[error("grids are incompatible: {0}")]
    IncompatibleGrids(String),
    #[error("function is not log-concave: {0}")]
    NotLogConcave(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
