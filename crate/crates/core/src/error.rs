use thiserror::Error;

use crate::extension::ExtensionStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("malformed element: {0}")]
    MalformedElement(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("element is not selfadjoint (deviation {0:e})")]
    NotSelfAdjoint(f64),

    #[error("element is not a projection within tolerance {0:e}")]
    NotAProjection(f64),

    #[error("spectrum outside [0, 1]: eigenvalue {0}")]
    SpectrumOutOfRange(f64),

    #[error("rank {rank} out of range for block {block} of size {size}")]
    RankOutOfRange {
        block: usize,
        rank: usize,
        size: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("measure cannot be evaluated at this projection: {0}")]
    Unevaluable(String),

    #[error("representation error: {0}")]
    Representation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("Bloch vector is not a unit vector (norm {0})")]
    NonUnitVector(f64),

    #[error("singular linear system while reconstructing block {0}")]
    SingularSystem(usize),

    #[error("component {index} could not be extended: {status}")]
    Component { index: usize, status: ExtensionStatus },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
