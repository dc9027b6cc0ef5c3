use thiserror::Error;

/// Errors produced by the geometry kernels.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree out of range: {0}")]
    DegreeOverflow(String),

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("immersion jet is rank-deficient at {point:?}")]
    RankDeficient { point: Vec<f64> },

    #[error("structure invariant violated: {what} (residual {residual:.3e})")]
    InvariantViolation { what: String, residual: f64 },

    #[error("inconsistent inputs: {what} (residual {residual:.3e} exceeds {allowed:.3e})")]
    InconsistentInput {
        what: String,
        residual: f64,
        allowed: f64,
    },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation failed at {point:?}")]
    AtPoint {
        point: Vec<f64>,
        #[source]
        source: Box<GeomError>,
    },
}

impl GeomError {
    /// Attach the sample point at which a downstream computation failed.
    pub fn at_point(self, point: &[f64]) -> GeomError {
        GeomError::AtPoint {
            point: point.to_vec(),
            source: Box::new(self),
        }
    }

    pub fn invariant(what: impl Into<String>, residual: f64) -> GeomError {
        GeomError::InvariantViolation {
            what: what.into(),
            residual,
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
