use alloc::string::String;

/// Errors raised by the estimation and testing pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("basis not identifiable on grid")]
    BasisNotIdentifiable,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("lag {lag} out of range for window length {len}")]
    LagOutOfRange { lag: isize, len: usize },
    #[error("window too short: floor(eta * T) = {len} < 2")]
    WindowTooShort { len: usize },
    #[error("bandwidth {0} outside (0, 1] or too small for the sample")]
    Bandwidth(f64),
    #[error("band [{lo}, {hi}] is not a sub-interval of [0, pi]")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("operator not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("component {k} exceeds the {available} stored components")]
    ComponentOutOfRange { k: usize, available: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid pivot parameters: {0}")]
    Pivot(String),
    #[error("dependent samples require equal lengths and bandwidths (T1 = {t1}, T2 = {t2}, b1 = {b1}, b2 = {b2})")]
    DependenceViolation { t1: usize, t2: usize, b1: f64, b2: f64 },
    #[error("scenario parameter out of range: {0}")]
    Scenario(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;
