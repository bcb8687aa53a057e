//! Numeric carriers shared by all modules.

use std::fmt;

use rug::float::Round;
use rug::ops::AssignRound;
use rug::{Float, Rational};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

/// Exact rational in lowest terms with a positive denominator.
pub type ExactRational = Rational;

/// Arbitrary-precision real with an explicit precision in bits.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub fn new(value: Float) -> Self {
        BigReal(value)
    }

    pub fn zero(precision_bits: u32) -> Self {
        BigReal(Float::new(precision_bits))
    }

    pub fn from_rational(value: &Rational, precision_bits: u32) -> Self {
        BigReal(Float::with_val(precision_bits, value))
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec()
    }

    pub fn value(&self) -> &Float {
        &self.0
    }

    pub fn into_inner(self) -> Float {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Number of significant decimal digits carried by the precision.
    pub fn decimal_digits(&self) -> usize {
        (f64::from(self.0.prec()) * std::f64::consts::LOG10_2).floor() as usize
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }
}

impl From<Float> for BigReal {
    fn from(value: Float) -> Self {
        BigReal(value)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(digits) => f.write_str(&self.to_decimal(digits)),
            None => f.write_str(&self.to_decimal(self.decimal_digits())),
        }
    }
}

// JSON carries reals as decimal strings so no digits are lost to f64.
impl Serialize for BigReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BigReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let parsed = Float::parse(&text).map_err(de::Error::custom)?;
        let digits = text
            .trim_start_matches('-')
            .split(['e', 'E'])
            .next()
            .unwrap_or("")
            .chars()
            .filter(char::is_ascii_digit)
            .count()
            .max(1);
        let bits = ((digits as f64) / std::f64::consts::LOG10_2).ceil() as u32 + 8;
        Ok(BigReal(Float::with_val(bits.max(53), parsed)))
    }
}

pub(crate) fn pi(precision_bits: u32) -> Float {
    Float::with_val(precision_bits, rug::float::Constant::Pi)
}

pub(crate) fn pi_rounded(precision_bits: u32, round: Round) -> Float {
    let mut x = Float::new(precision_bits);
    x.assign_round(rug::float::Constant::Pi, round);
    x
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Euler's totient by trial division.
pub(crate) fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            while n % d == 0 {
                n /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Smallest integer `r` with `r * r >= n`.
pub(crate) fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}
