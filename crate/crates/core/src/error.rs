use thiserror::Error;

/// Errors produced by constructions, verifications and reconstructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("no built-in irreducible polynomial for GF({p}^{n}); supply a modulus")]
    UnsupportedField { p: u32, n: u32 },

    #[error("modulus polynomial {0:?} is not monic of the expected degree")]
    BadModulus(Vec<u32>),

    #[error("modulus polynomial {0:?} is reducible")]
    ReducibleModulus(Vec<u32>),

    #[error("operands belong to different fields")]
    MixedFields,

    #[error("zero has no multiplicative inverse")]
    DivisionByZero,

    #[error("dimension {0} is not supported here: {1}")]
    UnsupportedDimension(u64, &'static str),

    #[error("invalid dimension string {0:?}")]
    BadDimensionSpec(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("label out of range: {0}")]
    BadLabel(String),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("vector set is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("projection mismatch: deviation {0:e} from the predicted state")]
    ProjectionMismatch(f64),

    #[error("probability table is invalid: {0}")]
    BadProbabilities(String),

    #[error("probability table is missing settings: {0}")]
    MissingSettings(String),

    #[error("reconstruction is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("file format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
