use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {n} outside supported range {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },
    #[error("coordinate {i} out of range for dimension {n}")]
    CoordinateOutOfRange { i: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("semigroup time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("function is constant")]
    ConstantFunction,
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("vector is zero and cannot be normalized")]
    ZeroVector,
    #[error("alternating ascent hit M u = 0")]
    DegenerateAscent,
    #[error("index {k} outside {min}..={max}")]
    IndexOutOfRange { k: i64, min: i64, max: i64 },
    #[error("probability {0} outside the admissible range")]
    ProbabilityOutOfRange(f64),
    #[error("concentrated branch fails: 2 sqrt(p(1-p)) + sqrt(1-theta) = {branch2} >= 1")]
    ConcentratedBranchFails { branch2: f64 },
    #[error("no positive epsilon satisfies the contradiction conditions")]
    NoEpsilon,
    #[error("argument {0} outside the open unit interval")]
    OutsideUnitInterval(f64),
    #[error("function is not strictly concave on the grid")]
    NotConcave,
    #[error("value {0} outside [0, 1]")]
    ValueOutOfRange(f64),
    #[error("expected {expected} n, got {n}")]
    Parity { n: usize, expected: &'static str },
    #[error("no witness found in the scan")]
    NoWitness,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
