//! Gamma at half-integers, the modified Bessel function `I_ν` by its power
//! series, and the divergent large-argument expansion of `I_ν`.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::numeric::{pi, BigReal, ExactRational};

/// Order `ν`, stored as `2ν` so integer and half-integer orders are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder {
    two_nu: u32,
}

impl BesselOrder {
    pub fn from_twice(two_nu: u32) -> Self {
        BesselOrder { two_nu }
    }

    pub fn integer(nu: u32) -> Self {
        BesselOrder { two_nu: 2 * nu }
    }

    pub fn twice(self) -> u32 {
        self.two_nu
    }

    pub fn is_integer(self) -> bool {
        self.two_nu % 2 == 0
    }

    pub fn as_rational(self) -> ExactRational {
        ExactRational::from((self.two_nu, 2u32))
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.two_nu) / 2.0
    }
}

/// `Γ(z)` for `z = twice_z / 2 ∈ {1/2, 1, 3/2, ...}`.
///
/// Built from `Γ(1) = 1`, `Γ(1/2) = √π` and `Γ(z+1) = zΓ(z)`; the product of
/// the recurrence factors is formed exactly before rounding.
pub fn gamma_half(twice_z: u32, precision_bits: u32) -> Result<BigReal> {
    if twice_z == 0 {
        return Err(Error::InvalidArgument("Γ(z) needs z > 0".into()));
    }
    let value = if twice_z % 2 == 0 {
        let factorial = Integer::from(Integer::factorial(twice_z / 2 - 1));
        Float::with_val(precision_bits, factorial)
    } else {
        // Γ(j + 1/2) = √π Π_{i<j} (i + 1/2) = √π (2j-1)!! / 2^j
        let j = twice_z / 2;
        let double_factorial = (0..j).fold(Integer::from(1), |acc, i| acc * (2 * i + 1));
        let work = precision_bits + 16;
        let root_pi = pi(work).sqrt();
        let scaled = (root_pi * Float::with_val(work, double_factorial)) >> j;
        Float::with_val(precision_bits, scaled)
    };
    Ok(BigReal::new(value))
}

/// Extra working bits for the power series at argument `s`: the largest term
/// sits near `e^s` relative to the first one.
fn series_guard_bits(nu: BesselOrder, s: f64) -> u32 {
    let extra = s / std::f64::consts::LN_2 - nu.as_f64() * (s / 2.0).log2();
    64 + extra.max(0.0).ceil() as u32
}

/// `I_ν(s) = Σ_{m≥0} (s/2)^{ν+2m} / (m! Γ(ν+m+1))` to `precision_bits` relative accuracy.
///
/// All terms are positive, so stopping at the first term below
/// `2^{-work}` times the partial sum bounds the relative truncation error.
pub fn bessel_i_series(nu: BesselOrder, s: &Float, precision_bits: u32) -> Result<BigReal> {
    if s.is_nan() || s.is_sign_negative() && !s.is_zero() {
        return Err(Error::InvalidArgument(format!("I_ν(s) needs s ≥ 0, got {s}")));
    }
    if s.is_zero() {
        let v = if nu.two_nu == 0 { 1 } else { 0 };
        return Ok(BigReal::new(Float::with_val(precision_bits, v)));
    }
    let work = precision_bits + series_guard_bits(nu, s.to_f64());
    let half = Float::with_val(work, s) / 2u32;
    let quarter_sq = Float::with_val(work, half.square_ref());

    let lead = if nu.is_integer() {
        Float::with_val(work, half.pow(nu.two_nu / 2))
    } else {
        Float::with_val(work, half.sqrt().pow(nu.two_nu))
    };
    let gamma = gamma_half(nu.two_nu + 2, work)?.into_inner();
    let mut term = lead / gamma;
    let mut sum = term.clone();
    let mut m = 0u64;
    loop {
        m += 1;
        // t_m = t_{m-1} (s/2)² / (m (ν + m)) = t_{m-1} (s/2)² · 2 / (m (2ν + 2m))
        term *= &quarter_sq;
        term /= m;
        term /= u64::from(nu.two_nu) + 2 * m;
        term <<= 1u32;
        sum += &term;
        let (Some(te), Some(se)) = (term.get_exp(), sum.get_exp()) else {
            break;
        };
        let past_peak = (m as f64) * (f64::from(nu.two_nu) + 2.0 * m as f64) > 2.0 * quarter_sq.to_f64();
        if past_peak && i64::from(te) + i64::from(work) < i64::from(se) - 1 {
            break;
        }
    }
    Ok(BigReal::new(Float::with_val(precision_bits, sum)))
}

/// `d_m(ν) = binom(ν - 1/2, m) (ν + 1/2)_m / 2^m`, exactly.
pub fn asymptotic_coefficient(nu: BesselOrder, m: u32) -> ExactRational {
    let a = nu.as_rational() - ExactRational::from((1, 2));
    let b = nu.as_rational() + ExactRational::from((1, 2));
    let mut value = ExactRational::from(1);
    for i in 0..m {
        // binom(a, m) = Π (a - i)/(i + 1); (b)_m = Π (b + i)
        let falling = ExactRational::from(&a - ExactRational::from(i));
        let rising = ExactRational::from(&b + ExactRational::from(i));
        value *= falling * rising;
        value /= 2 * (i + 1);
    }
    value
}

/// Truncation `e^s/√(2πs) Σ_{m=0}^{terms} (-1)^m d_m(ν) / s^m` of the
/// large-argument expansion. Divergent as `terms → ∞`; used for asymptotics
/// and cross-checks only.
pub fn bessel_i_asymptotic(nu: BesselOrder, s: &Float, terms: u32, precision_bits: u32) -> Result<BigReal> {
    if !(s.is_finite() && *s > 0) {
        return Err(Error::InvalidArgument(format!("asymptotic I_ν(s) needs s > 0, got {s}")));
    }
    let work = precision_bits + 32;
    let s = Float::with_val(work, s);
    let mut series = Float::new(work);
    let mut power = Float::with_val(work, 1);
    for m in 0..=terms {
        let d = Float::with_val(work, &asymptotic_coefficient(nu, m));
        let contribution = d * &power;
        if m % 2 == 0 {
            series += contribution;
        } else {
            series -= contribution;
        }
        power /= &s;
    }
    let two_pi_s = pi(work) * &s * 2u32;
    let prefactor = Float::with_val(work, s.exp_ref()) / two_pi_s.sqrt();
    Ok(BigReal::new(Float::with_val(precision_bits, prefactor * series)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREC: u32 = 192;

    fn f(x: f64) -> Float {
        Float::with_val(PREC, x)
    }

    fn rel_diff(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(PREC, a - b).abs();
        (d / Float::with_val(PREC, b.abs_ref())).to_f64()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(*gamma_half(2, 64).unwrap().value(), 1);
        assert_eq!(*gamma_half(8, 64).unwrap().value(), 6);
        let root_pi = pi(PREC).sqrt();
        assert!(rel_diff(gamma_half(1, PREC).unwrap().value(), &root_pi) < 1e-55);
        let seven_halves = Float::with_val(PREC, &root_pi * 15u32) / 8u32;
        assert!(rel_diff(gamma_half(7, PREC).unwrap().value(), &seven_halves) < 1e-55);
        // Cross-check against MPFR's gamma.
        for twice in 1..40u32 {
            let want = Float::with_val(PREC, f64::from(twice) / 2.0).gamma();
            assert!(rel_diff(gamma_half(twice, PREC).unwrap().value(), &want) < 1e-55, "Γ({twice}/2)");
        }
        assert!(gamma_half(0, 64).is_err());
    }

    #[test]
    fn series_special_values() {
        assert_eq!(*bessel_i_series(BesselOrder::integer(2), &f(0.0), 64).unwrap().value(), 0);
        assert_eq!(*bessel_i_series(BesselOrder::integer(0), &f(0.0), 64).unwrap().value(), 1);
        // I_{1/2}(s) = √(2/(πs)) sinh s
        for s in [1.0, 0.25, 7.5, 60.0] {
            let x = f(s);
            let closed = Float::with_val(PREC, 2u32) / (pi(PREC) * &x);
            let closed = closed.sqrt() * x.clone().sinh();
            let got = bessel_i_series(BesselOrder::from_twice(1), &x, PREC).unwrap();
            assert!(rel_diff(got.value(), &closed) < 1e-54, "s = {s}");
        }
        assert!(bessel_i_series(BesselOrder::integer(1), &f(-1.0), 64).is_err());
    }

    #[test]
    fn three_term_recurrence() {
        // I_{ν-1}(s) - I_{ν+1}(s) = (2ν/s) I_ν(s)
        for two_nu in [2u32, 3, 4, 5, 6] {
            for s in [1.0, 10.0, 100.0] {
                let x = f(s);
                let lo = bessel_i_series(BesselOrder::from_twice(two_nu - 2), &x, PREC).unwrap();
                let mid = bessel_i_series(BesselOrder::from_twice(two_nu), &x, PREC).unwrap();
                let hi = bessel_i_series(BesselOrder::from_twice(two_nu + 2), &x, PREC).unwrap();
                let rhs = Float::with_val(PREC, mid.value() * two_nu) / &x;
                let resid = Float::with_val(PREC, lo.value() - hi.value()) - rhs;
                let rel = (resid.abs() / lo.value()).to_f64();
                assert!(rel < 2f64.powi(-(PREC as i32 - 16)), "2ν={two_nu} s={s} rel={rel:e}");
            }
        }
    }

    #[test]
    fn precision_is_stable_and_monotone() {
        let nu = BesselOrder::from_twice(3);
        let mut prev = Float::new(PREC);
        for i in 1..40 {
            let x = f(f64::from(i) * 2.5);
            let low = bessel_i_series(nu, &x, 128).unwrap();
            let high = bessel_i_series(nu, &x, 256).unwrap();
            assert!(rel_diff(low.value(), high.value()) < 2f64.powi(-125));
            assert!(*high.value() > prev);
            prev = high.into_inner();
        }
    }

    #[test]
    fn asymptotic_coefficients() {
        let two = BesselOrder::integer(2);
        assert_eq!(asymptotic_coefficient(two, 0), 1);
        assert_eq!(asymptotic_coefficient(two, 1), ExactRational::from((15, 8)));
        assert_eq!(asymptotic_coefficient(two, 2), ExactRational::from((105, 128)));
        assert_eq!(asymptotic_coefficient(two, 3), ExactRational::from((-315, 1024)));
        // d_m(ν) = Π_{i=1}^m (4ν² - (2i-1)²) / (m! 8^m)
        for two_nu in 0..9u32 {
            let nu = BesselOrder::from_twice(two_nu);
            let four_nu_sq = ExactRational::from(two_nu * two_nu);
            let mut classic = ExactRational::from(1);
            for i in 1..8u32 {
                let odd = ExactRational::from((2 * i - 1) * (2 * i - 1));
                classic *= ExactRational::from(&four_nu_sq - odd) / (8 * i);
                assert_eq!(asymptotic_coefficient(nu, i), classic);
            }
        }
    }

    #[test]
    fn asymptotic_truncations() {
        let two = BesselOrder::integer(2);
        let x = f(50.0);
        let lead = bessel_i_asymptotic(two, &x, 0, PREC).unwrap();
        let want = Float::with_val(PREC, x.exp_ref()) / (pi(PREC) * &x * 2u32).sqrt();
        assert!(rel_diff(lead.value(), &want) < 1e-50);
        let one = bessel_i_asymptotic(two, &x, 1, PREC).unwrap();
        let want_one = want * (Float::with_val(PREC, 1) - Float::with_val(PREC, 15) / (x.clone() * 8u32));
        assert!(rel_diff(one.value(), &want_one) < 1e-50);
        let four = bessel_i_asymptotic(two, &x, 4, PREC).unwrap();
        let exact = bessel_i_series(two, &x, PREC).unwrap();
        assert!(rel_diff(four.value(), exact.value()) < 1e-4);
    }

    #[test]
    fn asymptotic_error_shrinks_with_argument() {
        // Half-integer orders are skipped: their expansion terminates and is exact up to e^{-2s}.
        for two_nu in [2u32, 4, 6] {
            let nu = BesselOrder::from_twice(two_nu);
            let mut last = f64::INFINITY;
            for s in [20.0, 40.0, 80.0, 160.0] {
                let x = f(s);
                let asy = bessel_i_asymptotic(nu, &x, 2, PREC).unwrap();
                let exact = bessel_i_series(nu, &x, PREC).unwrap();
                let err = rel_diff(asy.value(), exact.value());
                assert!(err < last, "2ν={two_nu} s={s}");
                last = err;
            }
        }
    }
}
