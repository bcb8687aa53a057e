//! The exponential sums
//!
//! ```text
//! Â_k(n) = Σ_{0≤h<k, gcd(h,k)=1} exp(-2πinh/k - πi Σ_r δ_r s(m_r h/g_r, k/g_r)),   g_r = gcd(m_r, k)
//! ```
//!
//! Every phase is a rational with denominator dividing `12k` (since
//! `6k s(h, k)` is an integer), so phases are assembled exactly as integers
//! modulo `24k` and only the final `cos(πθ)`, `sin(πθ)` are rounded.

use rug::Float;

use crate::dedekind::dedekind_sum_scaled;
use crate::error::{Error, Result};
use crate::etaquotient::EtaQuotient;
use crate::numeric::{gcd, is_prime, BigReal, ExactRational};

pub const MIN_PRECISION: u32 = 32;

/// Phase numerators `t_h ∈ [0, 24k)` with `θ_h = t_h / (12k)`, in increasing `h`.
fn scaled_phases(spec: &EtaQuotient, k: u64, n: u64) -> Result<Vec<(u64, i128)>> {
    if k == 0 {
        return Err(Error::ZeroModulus);
    }
    let k_i = i128::from(k);
    let modulus = 24 * k_i;
    let n_mod = i128::from(n % k);
    let mut phases = Vec::new();
    for h in 0..k {
        if gcd(h, k) != 1 {
            continue;
        }
        // 12k θ = -24 n h - Σ_r δ_r g_r (12 (k/g_r) s(m_r h/g_r, k/g_r)).
        let mut t = -24 * n_mod * i128::from(h);
        for (m, d) in spec.factors() {
            let g = gcd(m, k);
            let kr = k / g;
            let hr = ((u128::from(m / g) * u128::from(h)) % u128::from(kr)) as u64;
            t -= i128::from(d) * i128::from(g) * dedekind_sum_scaled(hr, kr)?;
        }
        phases.push((h, t.rem_euclid(modulus)));
    }
    Ok(phases)
}

/// The phase `θ_h ∈ [0, 2)` of the `h`-th summand, so the term is `exp(πiθ_h)`.
pub fn phase(spec: &EtaQuotient, k: u64, n: u64, h: u64) -> Result<ExactRational> {
    let phases = scaled_phases(spec, k, n)?;
    phases
        .iter()
        .find(|(hh, _)| *hh == h)
        .map(|&(_, t)| ExactRational::from((rug::Integer::from(t), rug::Integer::from(12 * i128::from(k)))))
        .ok_or(Error::NotCoprime { h, k })
}

/// Real and imaginary parts of `Â_k(n)` summed in increasing `h`.
pub fn a_hat_complex(spec: &EtaQuotient, k: u64, n: u64, precision_bits: u32) -> Result<(BigReal, BigReal)> {
    if precision_bits < MIN_PRECISION {
        return Err(Error::PrecisionTooSmall(precision_bits));
    }
    let phases = scaled_phases(spec, k, n)?;
    let work = precision_bits + 8;
    let denom = 12 * k;
    let mut re = Float::new(work);
    let mut im = Float::new(work);
    for (_, t) in phases {
        // t < 24k, so t/(12k) ∈ [0, 2) rounds only once.
        let x = Float::with_val(work, t) / denom;
        re += x.clone().cos_pi();
        im += x.sin_pi();
    }
    Ok((
        BigReal::new(Float::with_val(precision_bits, re)),
        BigReal::new(Float::with_val(precision_bits, im)),
    ))
}

/// `Re Â_k(n)` at `precision_bits`, after checking the imaginary part is
/// below `2^{-(precision_bits-16)}` times the number of summands.
pub fn a_hat(spec: &EtaQuotient, k: u64, n: u64, precision_bits: u32) -> Result<BigReal> {
    let (re, im) = a_hat_complex(spec, k, n, precision_bits)?;
    let count = crate::numeric::totient(k) as f64;
    let bound = count * 2f64.powi(-(precision_bits as i32 - 16));
    let residual = im.value().to_f64().abs();
    if residual > bound {
        return Err(Error::ImaginaryResidual { k, residual, bound });
    }
    Ok(re)
}

/// `Re Â_k(n)` through conjugate pairing, for the series engine.
///
/// Since `s(k-h, k) = -s(h, k)`, the phases satisfy `θ_{k-h} ≡ -θ_h (mod 2)`.
/// The pairing is verified exactly on the integer phases, after which the
/// imaginary part is exactly zero and the real part is `2 Σ_{h<k/2} cos(πθ_h)`.
pub fn a_hat_paired(spec: &EtaQuotient, k: u64, n: u64, precision_bits: u32) -> Result<BigReal> {
    if precision_bits < MIN_PRECISION {
        return Err(Error::PrecisionTooSmall(precision_bits));
    }
    let phases = scaled_phases(spec, k, n)?;
    let modulus = 24 * i128::from(k);
    let len = phases.len();
    let paired = (0..len).all(|i| (phases[i].1 + phases[len - 1 - i].1) % modulus == 0);
    if !paired {
        return Err(Error::UnpairedPhases { k });
    }
    let work = precision_bits + 8;
    let denom = 12 * k;
    let mut re = Float::new(work);
    for &(_, t) in &phases[..len / 2] {
        re += (Float::with_val(work, t) / denom).cos_pi();
    }
    re <<= 1u32;
    if len % 2 == 1 {
        // Only k ≤ 2: a single self-conjugate term, t ∈ {0, 12k}.
        re += (Float::with_val(work, phases[len / 2].1) / denom).cos_pi();
    }
    Ok(BigReal::new(Float::with_val(precision_bits, re)))
}

/// `b_k(n)`: the sum `Â_k(n)` for `m = (1, p)`, `δ = (-1, -1)`.
pub fn b_k(p: u64, k: u64, n: u64, precision_bits: u32) -> Result<BigReal> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    a_hat(&EtaQuotient::two_color(p), k, n, precision_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dedekind::dedekind_sum_def;
    use crate::numeric::pi;

    fn close(x: &BigReal, want: f64, tol: f64) -> bool {
        (x.to_f64() - want).abs() <= tol
    }

    /// Term-by-term evaluation straight from the `b_k(n)` display:
    /// exp(-2πnhi/k + πi s(h,k) + πi s(ph/g, k/g)), with the defining Dedekind sum.
    fn b_k_reference(p: u64, k: u64, n: u64, prec: u32) -> (Float, Float) {
        let mut re = Float::new(prec);
        let mut im = Float::new(prec);
        let g = gcd(p, k);
        for h in 0..k {
            if gcd(h, k) != 1 {
                continue;
            }
            let theta = ExactRational::from((-2 * (n * h) as i64, k as i64))
                + dedekind_sum_def(h, k).unwrap()
                + dedekind_sum_def(p * h / g, k / g).unwrap();
            let angle = Float::with_val(prec, &theta) * pi(prec);
            re += angle.clone().cos();
            im += angle.sin();
        }
        (re, im)
    }

    #[test]
    fn k_equals_one_is_one() {
        for spec in [EtaQuotient::partitions(), EtaQuotient::two_color(7), "2^-3*3^1".parse().unwrap()] {
            for n in [0u64, 1, 17, 1000] {
                assert_eq!(*a_hat(&spec, 1, n, 64).unwrap().value(), 1);
            }
        }
    }

    #[test]
    fn partitions_k_two_alternates() {
        for n in 0..6u64 {
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(close(&a_hat(&EtaQuotient::partitions(), 2, n, 128).unwrap(), want, 1e-30));
        }
    }

    #[test]
    fn b_k_examples() {
        assert!(close(&b_k(2, 1, 5, 64).unwrap(), 1.0, 0.0));
        assert!(close(&b_k(2, 2, 1, 128).unwrap(), -1.0, 1e-30));
        assert!(close(&a_hat(&EtaQuotient::two_color(2), 2, 1, 128).unwrap(), -1.0, 1e-30));
        // p = 2, k = 3, n = 0: h = 1 gives s(1,3) + s(2,3) = 0, h = 2 gives
        // s(2,3) + s(1,3) = 0, so both phases vanish and the sum is 2.
        let (re, _) = b_k_reference(2, 3, 0, 128);
        assert!((re.to_f64() - 2.0).abs() < 1e-30);
        assert!(close(&b_k(2, 3, 0, 128).unwrap(), 2.0, 1e-30));
        assert_eq!(b_k(4, 3, 0, 64), Err(Error::NotPrime(4)));
    }

    #[test]
    fn b_k_matches_display_formula() {
        for p in [2u64, 3, 5, 23] {
            for k in 1..40u64 {
                for n in [0u64, 1, 2, 7, 30] {
                    let (want_re, want_im) = b_k_reference(p, k, n, 160);
                    let (re, im) = a_hat_complex(&EtaQuotient::two_color(p), k, n, 160).unwrap();
                    let dre = Float::with_val(160, re.value() - &want_re).abs();
                    let dim = Float::with_val(160, im.value() - &want_im).abs();
                    assert!(dre < 1e-40 && dim < 1e-40, "p={p} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn realness_bound_and_trivial_bound() {
        let specs = [EtaQuotient::partitions(), EtaQuotient::two_color(11), "1^-2*3^1*6^-1".parse().unwrap()];
        for spec in &specs {
            for k in 1..60u64 {
                for n in [0u64, 3, 11] {
                    let (re, im) = a_hat_complex(spec, k, n, 96).unwrap();
                    let count = crate::numeric::totient(k) as f64;
                    assert!(im.to_f64().abs() <= count * 2f64.powi(-80), "{spec} k={k} n={n}");
                    assert!(re.to_f64().abs() <= count + 1e-20);
                }
            }
        }
    }

    #[test]
    fn periodic_in_n() {
        let spec = EtaQuotient::two_color(5);
        for k in 1..30u64 {
            for n in 0..10u64 {
                let a = scaled_phases(&spec, k, n).unwrap();
                let b = scaled_phases(&spec, k, n + k).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn phase_is_reduced_mod_two() {
        let spec = EtaQuotient::two_color(3);
        let theta = phase(&spec, 7, 4, 3).unwrap();
        assert!(theta >= 0 && theta < 2);
        let direct = ExactRational::from((-2 * 4 * 3, 7))
            + dedekind_sum_def(3, 7).unwrap()
            + dedekind_sum_def(9 % 7, 7).unwrap();
        let diff = ExactRational::from(&theta - &direct) / 2u32;
        assert_eq!(*diff.denom(), 1);
        assert!(phase(&spec, 6, 1, 2).is_err());
    }

    #[test]
    fn paired_sum_matches_direct_sum() {
        let specs = [EtaQuotient::partitions(), EtaQuotient::two_color(2), EtaQuotient::two_color(13), "1^-2*3^1*6^-1".parse().unwrap()];
        for spec in &specs {
            for k in 1..80u64 {
                for n in [0u64, 1, 5, 123] {
                    let direct = a_hat(spec, k, n, 128).unwrap();
                    let paired = a_hat_paired(spec, k, n, 128).unwrap();
                    let diff = Float::with_val(128, direct.value() - paired.value()).abs();
                    assert!(diff < 1e-33, "{spec} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn rejects_low_precision() {
        assert_eq!(a_hat(&EtaQuotient::partitions(), 3, 1, 31), Err(Error::PrecisionTooSmall(31)));
    }
}
