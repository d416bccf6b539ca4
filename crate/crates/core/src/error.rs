use thiserror::Error;

/// Errors raised by the numerical core and the scenario runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value produced by {0}")]
    NonFiniteValue(String),
    #[error("epsilon {eps} exceeds the admissible margin {margin}")]
    EpsilonTooLarge { eps: f64, margin: f64 },
    #[error("test form degree would be negative ({0})")]
    DegreeUnderflow(i64),
    #[error("degrees {0} + {1} do not add up to the ambient dimension {2}")]
    NotTopDegree(usize, usize, usize),
    #[error("de Rham data has no charts")]
    ChartCountZero,
    #[error("degenerate crossing at {location:?} (normalized determinant {det:e})")]
    DegenerateCrossing { location: Vec<f64>, det: f64 },
    #[error("intersection is not isolated at the given point")]
    NonIsolated,
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("chart cutoffs do not cover the support of the current near {0:?}")]
    UncoveredSupport(Vec<f64>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
