use thiserror::Error;

/// Errors raised by jet arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet shape mismatch: ({lhs_vars} vars, order {lhs_order}) vs ({rhs_vars} vars, order {rhs_order})")]
    ShapeMismatch {
        lhs_vars: usize,
        lhs_order: usize,
        rhs_vars: usize,
        rhs_order: usize,
    },
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("{func} is not defined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("multi-index of degree {degree} exceeds jet order {order}")]
    DegreeExceedsOrder { degree: usize, order: usize },
    #[error("multi-index has {got} entries, expected {expected}")]
    IndexLength { expected: usize, got: usize },
    #[error("seed coordinates must be non-empty and of equal length (x: {x}, y: {y})")]
    BadSeed { x: usize, y: usize },
    #[error("jet order must be at least {min}, got {got}")]
    OrderTooLow { min: usize, got: usize },
    #[error("jet has order 0 and cannot be differentiated")]
    ExhaustedOrder,
    #[error("finite-difference evaluation produced a non-finite value at offset {offset:?}")]
    NonFiniteEvaluation { offset: Vec<f64> },
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
}

/// Errors raised by the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("fiber coordinate y must be nonzero")]
    ZeroDirection,
    #[error("point dimension {got} does not match metric dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric value is not positive and finite at this point (F^2 = {0})")]
    NonPositiveMetric(f64),
    #[error("fundamental tensor is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("singular matrix in inversion (pivot {pivot:e})")]
    Singular { pivot: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("operation requires dimension n >= {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
