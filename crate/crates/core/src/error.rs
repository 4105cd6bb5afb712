use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation requires a {expected} group")]
    WrongGroupKind { expected: &'static str },
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    GroupTooLarge { order: u64, cap: u64 },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("endomorphism is not an automorphism")]
    NotAutomorphism,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("group specs differ")]
    SpecMismatch,
    #[error("dual point {point:?} lies outside the stored window; a larger window is required")]
    WindowTooSmall { point: Vec<i64> },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("characteristic function vanishes at {point:?}")]
    VanishingCharFn { point: Vec<i64> },
    #[error("Ker(I+alpha) is trivial")]
    TrivialKernel,
    #[error("support point {point:?} lies outside Ker(I+alpha)")]
    SupportOutsideKernel { point: Vec<i64> },
    #[error("no positive semidefinite pair found: {0}")]
    NoPsdPair(String),
    #[error("no damping exponent k <= {max_k} brings both coefficient sums below 2")]
    NoDampingExponent { max_k: u32 },
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
