use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("element {0} is not in the oriented subgroup")]
    NotOriented(String),

    #[error("boundary mismatch at index {index}: {msg}")]
    BoundaryMismatch { index: usize, msg: String },

    #[error("invalid sign sequence: {0}")]
    InvalidSigns(String),

    #[error("enumeration guard exceeded: {0} leaves requested, at most {1} allowed")]
    Guard(usize, usize),

    #[error("move not applicable: {0}")]
    InapplicableMove(String),

    #[error("diagram has open boundary ({0} endpoints)")]
    OpenBoundary(usize),

    #[error("diagram is not oriented")]
    Unoriented,

    #[error("matrix is not Hermitian (defect {0:e})")]
    NonHermitian(f64),

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("loop value vanishes at r={r}, k={k}")]
    DegenerateDelta { r: u32, k: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
