use thiserror::Error;

/// Errors for every engine operation. Variant names follow the operation
/// contracts; all of them are programmer-visible conditions, not panics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a prime in [2, 2^31 - 1]: {0}")]
    NotPrime(u64),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("minimal polynomial is a power of a single irreducible; no coprime split")]
    NoCoprimeSplit,
    #[error("factor index subset must be nonempty and proper")]
    InvalidPart,
    #[error("matrix dimensions incompatible: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square")]
    NotSquare,
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("idempotent must be nonzero")]
    ZeroIdempotent,
    #[error("algebra fails validation: {0}")]
    InvalidAlgebra(String),
    #[error("module fails validation: {0}")]
    InvalidModule(String),
    #[error("zero module has no endomorphism algebra")]
    ZeroModule,
    #[error("bi-chain invariant violated: {0}")]
    InvalidChain(String),
    #[error("locality verdict would be Monte Carlo beyond the configured budget")]
    InconclusiveLocality,
    #[error("isomorphism search inconclusive; raise the budget")]
    IsoSearchInconclusive,
    #[error("no summand matching exists: {0}")]
    MatchingFailed(String),
    #[error("idempotent sets are not complete orthogonal primitive: {0}")]
    NotCompleteOrthogonalPrimitive(String),
    #[error("decomposition certificate is internally invalid: {0}")]
    InvalidDecomposition(String),
    #[error("enumeration budget exceeded: would scan {0} elements")]
    BudgetExceeded(u128),
    #[error("certificate verification failed: {0}")]
    VerificationFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
