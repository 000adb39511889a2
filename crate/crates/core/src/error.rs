use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("precision exponent k must be at least 1")]
    InvalidExponent,
    #[error("element is not a unit modulo p^k (divisible by p)")]
    NotAUnit,
    #[error("element is not invertible modulo the triangular ideal")]
    NotInvertible,
    #[error("polynomial uses variable x_{var} beyond the ideal of length {ideal_len}")]
    VariableMismatch { var: usize, ideal_len: usize },
    #[error("invalid generator factorization: {0}")]
    InvalidFactorization(String),
    #[error("enumeration of {needed} points exceeds the cap of {cap}")]
    CapExceeded { needed: BigUint, cap: u64 },
    #[error("leading coefficient is divisible by p; polynomial is not monic mod p")]
    NotMonicModP,
    #[error("factors are not coprime modulo p")]
    NotCoprimeModP,
    #[error("Galois-ring root count {count} is not divisible by extension degree {b}")]
    DivisibilityViolation { count: BigUint, b: usize },
    #[error("polynomial has zero discriminant (not squarefree over Q)")]
    NotSquarefree,
    #[error("zero polynomial modulo p^k has unboundedly many factors")]
    ZeroPolynomial,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
