use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },
    #[error("coordinate {coord} out of range for n = {n}")]
    CoordinateOutOfRange { coord: u32, n: u32 },
    #[error("cannot exclude endpoints: points differ in {distance} < 2 coordinates")]
    HybridTooClose { distance: u32 },
    #[error("hybrid cube of 2^{log_points} points exceeds cap {cap}")]
    HybridCapExceeded { log_points: u32, cap: u64 },
    #[error("truth table dimension {n} exceeds limit {limit}")]
    TableTooLarge { n: u32, limit: u32 },
    #[error("noise rate {0} outside [0, 1]")]
    NoiseRateOutOfRange(f64),
    #[error("weight vector must contain a nonzero entry")]
    DegenerateWeights,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("negative-weight mass {neg_mass} does not exceed max weight {max_weight}")]
    NegativeMassTooSmall { neg_mass: f64, max_weight: f64 },
    #[error("function is constant; no violation witness exists")]
    ConstantFunction,
    #[error("constructed witness failed re-verification")]
    WitnessVerificationFailed,
    #[error("modified bisection not applicable at n = {n}: computed k = {k} < 0")]
    BelowMinimumDimension { k: i64, n: u64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("function document error: {0}")]
    FunctionDocument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
