use thiserror::Error;

/// Errors raised by the geometry and Monte Carlo routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live on different sample spaces")]
    SpaceMismatch,
    #[error("vectors are based at different densities")]
    BaseMismatch,
    #[error("sample space must have at least one atom")]
    EmptySpace,
    #[error("{what} must be strictly positive (index {index})")]
    NotPositive { what: &'static str, index: usize },
    #[error("{what} is not finite (index {index})")]
    NonFinite { what: &'static str, index: usize },
    #[error("density is not normalized: total mass {mass}")]
    NotNormalized { mass: f64 },
    #[error("variable is not centered: expectation {expectation}")]
    NotCentered { expectation: f64 },
    #[error("expected {expected} arguments, got {found}")]
    Arity { expected: &'static str, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("time {t} is not a node of the trajectory grid")]
    OffGrid { t: f64 },
    #[error("log-density magnitude {magnitude} exceeds {limit} at t = {t}")]
    FlowOverflow { t: f64, magnitude: f64, limit: f64 },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("collision direction is not a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("quadratic form has eigenvalue {eigenvalue}, must stay below {bound}")]
    SpectralBound { eigenvalue: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, GeometryError>;
