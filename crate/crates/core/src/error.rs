use thiserror::Error;

/// Errors raised by the laboratory. Infinite divergences are values, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("distribution must have at least one outcome")]
    EmptySupport,
    #[error("support sizes differ: {left} vs {right}")]
    SupportMismatch { left: usize, right: usize },
    #[error("Renyi order must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("invalid order {0}: must be positive and different from 1")]
    InvalidAlpha(f64),
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("pair ({x}, {y}) out of range for a {x_size}x{y_size} alphabet")]
    IndexOutOfRange {
        x: usize,
        y: usize,
        x_size: usize,
        y_size: usize,
    },
    #[error("dataset must contain at least one pair")]
    EmptyDataset,
    #[error("soft risk is numerically 1 (1 - R = {accuracy:e})")]
    DegenerateRisk { accuracy: f64 },
    #[error("enumeration of {size} outcomes exceeds the cap of {cap}")]
    EnumerationCapExceeded { size: u128, cap: u64 },
    #[error("hypothesis set is empty")]
    EmptyHypothesisSet,
    #[error("invalid bound order: {0}")]
    InvalidOrder(String),
    #[error("t must be positive, got {0}")]
    NonPositiveT(f64),
    #[error("moment generating function is infinite")]
    InfiniteMgf,
    #[error("moment generating function is infinite on the whole search range")]
    InfiniteMgfEverywhere,
    #[error("squared Hellinger distance is numerically 2")]
    DegenerateHellinger,
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("event has zero probability under the reference distribution")]
    NullEvent,
    #[error("malformed specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
