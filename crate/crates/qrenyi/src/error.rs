use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("operator has eigenvalue {eigenvalue:e} below the positivity tolerance")]
    NotPositive { eigenvalue: f64 },
    #[error("trace {trace} differs from 1")]
    TraceNotOne { trace: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid Renyi order {0}")]
    InvalidOrder(f64),
    #[error("state is not pure: purity {purity}")]
    NotPure { purity: f64 },
    #[error("generator is degenerate but a nondegenerate basis is required")]
    DegenerateBasis,
    #[error("distributions live on different grids")]
    GridMismatch,
    #[error("distribution is not normalized: total mass {mass}")]
    NotNormalized { mass: f64 },
    #[error("negative probability or density value {0}")]
    NegativeProbability(f64),
    #[error("POVM completeness defect {defect:e} exceeds tolerance")]
    IncompletePovm { defect: f64 },
    #[error("spectrum is not periodic: {0}")]
    NotPeriodic(String),
    #[error("no convergence: {0}")]
    NotConverged(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
