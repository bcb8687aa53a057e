use thiserror::Error;

use crate::etaquotient::Admissibility;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus k must be positive")]
    ZeroModulus,

    #[error("gcd({h}, {k}) != 1")]
    NotCoprime { h: u64, k: u64 },

    #[error("invalid eta-quotient: {0}")]
    InvalidEtaQuotient(String),

    #[error("cannot parse eta-quotient {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("eta-quotient is not admissible: {0}")]
    Inadmissible(Admissibility),

    #[error("n = {n} is outside the series range (need 24n + Δ2 > 0 and n ≥ 1, Δ2 = {delta2})")]
    OutOfRange { n: u64, delta2: i64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p = {0} is not an admissible prime (need p ∈ {{2,3,5,7,11,13,17,19,23}})")]
    PrimeNotAdmissible(u64),

    #[error("precision of {0} bits is too small (minimum 32)")]
    PrecisionTooSmall(u32),

    #[error("truncation K must be at least 1")]
    ZeroTruncation,

    #[error("truncation cap exceeded: needed K > {max_k}")]
    ResourceCap { max_k: u64 },

    #[error("imaginary residual {residual:e} exceeds bound {bound:e} for k = {k}")]
    ImaginaryResidual { k: u64, residual: f64, bound: f64 },

    #[error("phases of Â_{k} are not conjugate-paired")]
    UnpairedPhases { k: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration cap exceeded: n = {n} > {cap}")]
    EnumerationCap { n: u64, cap: u64 },
}
