use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the library.
///
/// The variants split into two families that the CLI maps onto distinct
/// exit codes: caller mistakes (bad parameters, violated hypotheses) and
/// honest negative answers ([`Error::NoExpansion`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field {p}^{m} exceeds the size cap of {cap} elements")]
    FieldTooLarge { p: u64, m: u32, cap: u64 },
    #[error("inverse of zero")]
    DivisionByZero,
    #[error("value {value} is not an element of a field with {q} elements")]
    ElementOutOfRange { value: u64, q: u64 },
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("hermitian form needs a field of even extension degree, got {p}^{m}")]
    NotQuadratic { p: u32, m: u32 },
    #[error("value is not fixed by x -> x^q, so it is outside the base subfield")]
    NotInBaseSubfield,
    #[error("{0}")]
    Unsupported(String),
    #[error("row space of the inner rows is not contained in the ambient row space")]
    NotContained,
    #[error("vector {0} has zero self inner product and cannot be used as a pivot")]
    DegenerateVector(usize),
    #[error("code has dimension zero; minimum distance is undefined")]
    ZeroCode,
    #[error("enumeration of {size} items exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    NoExpansion(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
