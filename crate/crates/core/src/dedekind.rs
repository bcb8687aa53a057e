//! Dedekind sums `s(h, k) = Σ_{j=1}^{k-1} (j/k)({hj/k} - 1/2)`.
//!
//! Two evaluators are provided. [`dedekind_sum_def`] is the O(k) defining
//! sum and serves as the reference. [`dedekind_sum_fast`] runs the Euclidean
//! algorithm on `(k, h)` and accumulates the reciprocity law
//!
//! ```text
//! s(h, k) + s(k, h) = -1/4 + (h/k + k/h + 1/(hk)) / 12
//! ```
//!
//! in telescoped integer form, so the whole evaluation is O(log k) integer
//! operations. Both return exact rationals.

use crate::error::{Error, Result};
use crate::numeric::{gcd, ExactRational};

/// Exact `s(h, k)` from the defining sum.
pub fn dedekind_sum_def(h: u64, k: u64) -> Result<ExactRational> {
    if k == 0 {
        return Err(Error::ZeroModulus);
    }
    if gcd(h, k) != 1 {
        return Err(Error::NotCoprime { h, k });
    }
    // Σ (j/k)(r_j/k - 1/2) with r_j = hj mod k equals Σ j r_j / k² - (k-1)/4.
    let step = h % k;
    let mut residue = 0u64;
    let mut weighted: u128 = 0;
    for j in 1..k {
        residue += step;
        if residue >= k {
            residue -= k;
        }
        weighted += u128::from(j) * u128::from(residue);
    }
    let k2 = u128::from(k) * u128::from(k);
    let sum = ExactRational::from((rug::Integer::from(weighted), rug::Integer::from(k2)));
    Ok(sum - ExactRational::from((k - 1, 4u64)))
}

/// Exact `s(h, k)` by Euclidean descent. Agrees with [`dedekind_sum_def`].
pub fn dedekind_sum_fast(h: u64, k: u64) -> Result<ExactRational> {
    let scaled = dedekind_sum_scaled(h, k)?;
    Ok(ExactRational::from((
        rug::Integer::from(scaled),
        rug::Integer::from(12 * i128::from(k)),
    )))
}

/// The integer `12k · s(h, k)`.
///
/// With `k/h = [a_1; a_2, ..., a_n]` and `y_n` the Bezout coefficient of `h`
/// (so `y_n h ≡ 1 mod k`), the reciprocity law chained along the Euclidean
/// algorithm collapses to
///
/// ```text
/// 12k s(h, k) = k Σ (-1)^{i+1} a_i + h + y_n - 3k [n odd]
/// ```
///
/// `h` is reduced modulo `k` first; `s(0, 1) = 0`.
pub fn dedekind_sum_scaled(h: u64, k: u64) -> Result<i128> {
    if k == 0 {
        return Err(Error::ZeroModulus);
    }
    let h_red = h % k;
    if k == 1 {
        return Ok(0);
    }
    if h_red == 0 {
        return Err(Error::NotCoprime { h, k });
    }

    let (mut a, mut b) = (i128::from(k), i128::from(h_red));
    let (mut y_prev, mut y) = (0i128, 1i128);
    let mut alternating = 0i128;
    let mut steps = 0u32;
    while b != 0 {
        let q = a / b;
        let r = a - q * b;
        alternating += if steps % 2 == 0 { q } else { -q };
        steps += 1;
        (y_prev, y) = (y, y_prev - q * y);
        (a, b) = (b, r);
    }
    if a != 1 {
        return Err(Error::NotCoprime { h, k });
    }

    let k = i128::from(k);
    let odd_correction = if steps % 2 == 1 { 3 * k } else { 0 };
    Ok(k * alternating + i128::from(h_red) + y_prev - odd_correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::from((n, d))
    }

    #[test]
    fn defining_sum_examples() {
        assert_eq!(dedekind_sum_def(1, 1).unwrap(), 0);
        assert_eq!(dedekind_sum_def(0, 1).unwrap(), 0);
        assert_eq!(dedekind_sum_def(1, 3).unwrap(), q(1, 18));
        assert_eq!(dedekind_sum_def(5, 7).unwrap(), q(-1, 14));
        assert_eq!(dedekind_sum_def(2, 5).unwrap(), 0);
    }

    #[test]
    fn fast_examples() {
        assert_eq!(dedekind_sum_fast(1, 2).unwrap(), 0);
        // The defining sum gives 0 here: (1/5)(1/10) - (2/5)(3/10) + (3/5)(3/10) - (4/5)(1/10).
        assert_eq!(dedekind_sum_fast(3, 5).unwrap(), 0);
        assert_eq!(dedekind_sum_fast(1, 3).unwrap(), q(1, 18));
        assert_eq!(dedekind_sum_fast(5, 7).unwrap(), q(-1, 14));
        assert_eq!(dedekind_sum_fast(0, 1).unwrap(), 0);
        assert_eq!(dedekind_sum_fast(12, 5).unwrap(), dedekind_sum_fast(2, 5).unwrap());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(dedekind_sum_def(2, 4), Err(Error::NotCoprime { h: 2, k: 4 }));
        assert_eq!(dedekind_sum_fast(6, 9), Err(Error::NotCoprime { h: 6, k: 9 }));
        assert_eq!(dedekind_sum_fast(0, 5), Err(Error::NotCoprime { h: 0, k: 5 }));
        assert_eq!(dedekind_sum_def(1, 0), Err(Error::ZeroModulus));
        assert_eq!(dedekind_sum_fast(1, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn agreement_up_to_300() {
        for k in 1..=300u64 {
            for h in 0..k {
                if gcd(h, k) == 1 {
                    assert_eq!(dedekind_sum_fast(h, k).unwrap(), dedekind_sum_def(h, k).unwrap(), "s({h},{k})");
                }
            }
        }
    }

    #[test]
    fn large_modulus_is_exact() {
        // 6k s(h,k) stays integral far beyond the range where the defining sum is practical.
        let k = 1_000_000_007u64;
        let s = dedekind_sum_fast(123_456_789, k).unwrap();
        let six_k_s = s * ExactRational::from(6 * k);
        assert_eq!(*six_k_s.denom(), 1);
        let closed = ExactRational::from(((k - 1) * (k - 2), 1u64)) / ExactRational::from(12 * k);
        assert_eq!(dedekind_sum_fast(1, k).unwrap(), closed);
    }

    proptest! {
        #[test]
        fn reciprocity(h in 1u64..5_000_000, k in 1u64..5_000_000) {
            prop_assume!(gcd(h, k) == 1);
            let lhs = dedekind_sum_fast(h, k).unwrap() + dedekind_sum_fast(k, h).unwrap();
            let hk = ExactRational::from((h, k));
            let kh = ExactRational::from((k, h));
            let inv = ExactRational::from((1u64, h * k));
            let rhs = ExactRational::from((-1, 4)) + (hk + kh + inv) / 12u32;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn oddness_and_integrality(k in 2u64..3000, h in 1u64..3000) {
            let h = h % k;
            prop_assume!(h > 0 && gcd(h, k) == 1);
            let s = dedekind_sum_fast(h, k).unwrap();
            prop_assert_eq!(dedekind_sum_fast(k - h, k).unwrap(), -s.clone());
            let scaled = s * ExactRational::from(6 * k);
            prop_assert_eq!(scaled.denom().to_u32(), Some(1));
        }
    }
}
