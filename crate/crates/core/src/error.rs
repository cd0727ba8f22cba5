use thiserror::Error;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input is inconsistent or names something that does not exist.
    Validation,
    /// Input is well formed but the requested construction is undefined for it.
    MathDomain,
    /// Floating point breakdown during evaluation.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    EmptyAlgebra,

    #[error("Jacobi identity violated: residual {residual:e} at basis triple ({}, {}, {})", triple.0 + 1, triple.1 + 1, triple.2 + 1)]
    JacobiViolation {
        residual: f64,
        triple: (usize, usize, usize),
    },

    #[error("Gram matrix is not symmetric (entry ({row}, {col}) differs by {gap:e})")]
    AsymmetricGram { row: usize, col: usize, gap: f64 },

    #[error("metric is not positive definite")]
    SingularMetric,

    #[error("algebra is not unimodular")]
    NotUnimodular,

    #[error("operation requires a 3-dimensional algebra, got dimension {0}")]
    NotThreeDimensional(usize),

    #[error("drift norm {norm} is not below 1; F is not a Finsler metric")]
    DriftTooLarge { norm: f64 },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("drift field is not parallel; flag curvature needs a Berwald structure")]
    NotBerwald,

    #[error("plane is degenerate (Gram determinant {0:e})")]
    DegeneratePlane(f64),

    #[error("flag is degenerate (g_Y determinant {0:e})")]
    DegenerateFlag(f64),

    #[error("frame is not orthonormal (defect {0:e})")]
    FrameNotOrthonormal(f64),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl GeometryError {
    pub fn class(&self) -> ErrorClass {
        use GeometryError::*;
        match self {
            DimensionMismatch { .. }
            | EmptyAlgebra
            | JacobiViolation { .. }
            | AsymmetricGram { .. }
            | SingularMetric
            | UnknownPreset(_)
            | ParamOutOfRange(_) => ErrorClass::Validation,
            NotUnimodular
            | NotThreeDimensional(_)
            | DriftTooLarge { .. }
            | ZeroVector
            | NotBerwald
            | DegeneratePlane(_)
            | DegenerateFlag(_)
            | FrameNotOrthonormal(_) => ErrorClass::MathDomain,
            NumericalFailure(_) => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
