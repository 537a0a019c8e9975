use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("empty point set")]
    Empty,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("the origin is not strictly interior")]
    OriginNotInterior,
    #[error("degenerate body: {0}")]
    Degenerate(String),
    #[error("inconsistent representation: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Failures of a single billiard step or of a whole simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BilliardError {
    /// The point lies on a face of codimension at least two, or off the boundary.
    #[error("non-classical point at bounce {bounce}: {reason}")]
    NonClassical { bounce: usize, reason: String },
    #[error("degenerate step at bounce {bounce}: {reason}")]
    Degenerate { bounce: usize, reason: String },
    #[error("trajectory did not close within {0} bounces")]
    NotClosed(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl BilliardError {
    pub(crate) fn at(self, bounce: usize) -> Self {
        match self {
            BilliardError::NonClassical { reason, .. } => BilliardError::NonClassical { bounce, reason },
            BilliardError::Degenerate { reason, .. } => BilliardError::Degenerate { bounce, reason },
            other => other,
        }
    }

    pub(crate) fn non_classical(reason: impl Into<String>) -> Self {
        BilliardError::NonClassical {
            bounce: 0,
            reason: reason.into(),
        }
    }

    pub(crate) fn degenerate(reason: impl Into<String>) -> Self {
        BilliardError::Degenerate {
            bounce: 0,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HannerError {
    #[error("beta {0} is forbidden for this pair of momentum polylines")]
    ForbiddenBeta(f64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("projection check failed: {0}")]
    ProjectionMismatch(String),
    #[error("composition requires a sum1 node")]
    NotSum1,
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
