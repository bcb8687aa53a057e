//! Exact Fourier coefficients of eta-quotients.
//!
//! The crate evaluates the Rademacher-type series for the coefficients of
//! `G(q) = Π_r (q^{m_r}; q^{m_r})_∞^{δ_r}`, certifies the truncation with a
//! rigorous tail bound and recovers the exact integer. The headline case is
//! the 2-color partition function `a_p(n)`, generated by
//! `1 / ((q;q)_∞ (q^p;q^p)_∞)`, which is admissible for primes `p ≤ 23`.
//!
//! Module map:
//!
//! - [`dedekind`]: exact Dedekind sums, by definition and by Euclidean descent.
//! - [`etaquotient`]: the eta-quotient type, its Δ-profile and admissibility.
//! - [`expsums`]: the exponential sums `Â_k(n)` and `b_k(n)`.
//! - [`besselgamma`]: Gamma at half-integers and the modified Bessel `I_ν`.
//! - [`rademacher`]: series evaluation, tail bounds and exact recovery.
//! - [`oracle`]: exact q-series coefficients used as ground truth.
//! - [`asymptotics`]: leading/log asymptotics, Turán check and scans.

pub mod asymptotics;
pub mod besselgamma;
pub mod dedekind;
mod error;
pub mod etaquotient;
pub mod expsums;
mod numeric;
pub mod oracle;
pub mod rademacher;

pub use error::{Error, Result};
pub use etaquotient::{Admissibility, DeltaProfile, EtaQuotient};
pub use numeric::{is_prime, BigReal, ExactRational};
pub use rademacher::{a_p, exact_coefficient, EngineOptions, SeriesEvaluation};


/// Primes for which the 2-color quotient `m = (1, p)`, `δ = (-1, -1)` is admissible.
pub const ADMISSIBLE_PRIMES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];
