use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    InvalidExtensionDegree,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the supported maximum of 65536")]
    FieldTooLarge(u64),
    #[error("modulus {0:?} is not monic of degree {1}")]
    ModulusShape(Vec<u32>, u32),
    #[error("modulus {0:?} is reducible over GF({1})")]
    ReducibleModulus(Vec<u32>, u32),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {value} out of range for GF({q})")]
    ElementOutOfRange { value: u32, q: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("line direction must be nonzero")]
    ZeroDirection,
    #[error("sample size tau = {tau} exceeds the {available} points available")]
    TauTooLarge { tau: usize, available: usize },
    #[error("product factor {0} is empty")]
    EmptyFactor(usize),
    #[error("grid of {size} points exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: u64 },
    #[error("matrix of {size} entries exceeds the cap of {cap}")]
    MatrixTooLarge { size: u128, cap: u64 },
    #[error("point set is not contained in the product set")]
    NotInProduct,
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
