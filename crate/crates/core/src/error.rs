use thiserror::Error;

/// Everything that can go wrong in the geometry kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid sphere: {0}")]
    InvalidSphere(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is off the sphere: |x| = {norm}, radius = {radius}")]
    NotOnSphere { norm: f64, radius: f64 },

    #[error("vector is not tangent at its base point (<v, p> = {0:e})")]
    NotTangent(f64),

    #[error("tangent vectors live at different base points (distance {0:e})")]
    BasePointMismatch(f64),

    #[error("degenerate plane: Gram determinant {0:e}")]
    DegeneratePlane(f64),

    #[error("expected a unit vector, got norm {0}")]
    NotUnit(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("field is singular here: {0}")]
    SingularLocus(String),

    #[error("singular decomposition failed: assembly residual {0:e}")]
    DecompositionFailure(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fiber frame propagation failed: table residual {0:e}")]
    PropagationFailure(f64),

    #[error("quadrature rejected {rejected} of {total} samples")]
    TooManyRejections { rejected: usize, total: usize },
}

impl GeometryError {
    /// Failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(
            self,
            GeometryError::DecompositionFailure(_)
                | GeometryError::PropagationFailure(_)
                | GeometryError::TooManyRejections { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
