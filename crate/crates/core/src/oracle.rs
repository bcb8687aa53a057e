//! Exact power-series coefficients of eta-quotients.
//!
//! This module is the independent ground truth for the series engine. Each
//! factor `(q^m; q^m)_∞` is expanded with the pentagonal number theorem,
//! which is sparse (`O(√N)` nonzero terms up to `q^N`), so multiplying or
//! dividing by one factor costs `O(N√N)` big-integer additions.

use std::fmt::Write as _;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etaquotient::EtaQuotient;

pub const DEFAULT_ENUMERATION_CAP: u64 = 40;

/// Coefficients `coeffs[n]` of an eta-quotient for `0 ≤ n ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub spec: EtaQuotient,
    #[serde(with = "integer_strings")]
    pub coeffs: Vec<Integer>,
}

impl CoeffTable {
    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<&Integer> {
        self.coeffs.get(n)
    }

    /// `n,coefficient` rows under a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,coefficient\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{c}").expect("write to string");
        }
        out
    }

    /// JSON array of decimal strings (integers exceed every JSON number type).
    pub fn to_json(&self) -> String {
        let strings: Vec<String> = self.coeffs.iter().map(Integer::to_string).collect();
        serde_json::to_string(&strings).expect("strings serialize")
    }
}

mod integer_strings {
    use rug::Integer;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(Integer::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|t| t.parse::<Integer>().map_err(de::Error::custom)).collect()
    }
}

/// Nonzero terms `(exponent, ±1)` of `(q^m; q^m)_∞` up to `q^N`, by increasing exponent.
///
/// Exponents are `m j(3j∓1)/2` for `j ≥ 0` with sign `(-1)^j`.
pub fn pentagonal_terms(m: u64, order: u64) -> Vec<(u64, i8)> {
    assert!(m > 0);
    let mut terms = vec![(0, 1)];
    for j in 1u64.. {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let lo = m * (j * (3 * j - 1) / 2);
        if lo > order {
            break;
        }
        terms.push((lo, sign));
        let hi = m * (j * (3 * j + 1) / 2);
        if hi <= order {
            terms.push((hi, sign));
        }
    }
    terms
}

/// Dense coefficients of `(q^m; q^m)_∞` up to `q^N`.
pub fn euler_coeffs(m: u64, order: u64) -> Vec<Integer> {
    let mut out = vec![Integer::new(); order as usize + 1];
    for (e, sign) in pentagonal_terms(m, order) {
        out[e as usize] = Integer::from(sign);
    }
    out
}

fn multiply_sparse(f: &mut [Integer], terms: &[(u64, i8)]) {
    // In place from the top down: g[n] = Σ_e sign_e f[n - e].
    for n in (0..f.len()).rev() {
        let mut acc = Integer::new();
        for &(e, sign) in terms {
            let e = e as usize;
            if e > n {
                break;
            }
            if sign > 0 {
                acc += &f[n - e];
            } else {
                acc -= &f[n - e];
            }
        }
        f[n] = acc;
    }
}

fn divide_sparse(f: &mut [Integer], terms: &[(u64, i8)]) {
    // g E = f with E[0] = 1 gives g[n] = f[n] - Σ_{e≥1} sign_e g[n - e].
    for n in 0..f.len() {
        let mut acc = std::mem::take(&mut f[n]);
        for &(e, sign) in terms.iter().skip(1) {
            let e = e as usize;
            if e > n {
                break;
            }
            if sign > 0 {
                acc -= &f[n - e];
            } else {
                acc += &f[n - e];
            }
        }
        f[n] = acc;
    }
}

/// Exact coefficients of `Π_r (q^{m_r}; q^{m_r})^{δ_r}` up to `q^N`.
pub fn eta_quotient_coeffs(spec: &EtaQuotient, order: u64) -> CoeffTable {
    let mut coeffs = vec![Integer::new(); order as usize + 1];
    coeffs[0] = Integer::from(1);
    for (m, d) in spec.factors() {
        let terms = pentagonal_terms(m, order);
        for _ in 0..d.unsigned_abs() {
            if d > 0 {
                multiply_sparse(&mut coeffs, &terms);
            } else {
                divide_sparse(&mut coeffs, &terms);
            }
        }
    }
    CoeffTable { spec: spec.clone(), coeffs }
}

/// Truncated product of two dense series.
pub fn convolve(a: &[Integer], b: &[Integer], order: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += Integer::from(x * y);
        }
    }
    out
}

/// Truncated inverse of a dense series with constant term ±1.
pub fn invert(f: &[Integer], order: usize) -> Vec<Integer> {
    assert!(f[0] == 1 || f[0] == -1, "constant term must be a unit");
    let mut g = vec![Integer::new(); order + 1];
    g[0] = f[0].clone();
    for n in 1..=order {
        let mut acc = Integer::new();
        for k in 1..=n.min(f.len() - 1) {
            acc += Integer::from(&f[k] * &g[n - k]);
        }
        // f[0] is its own inverse.
        g[n] = -(acc * &f[0]);
    }
    g
}

fn power(f: &[Integer], mut e: u64, order: usize) -> Vec<Integer> {
    let mut result = vec![Integer::new(); order + 1];
    result[0] = Integer::from(1);
    let mut base = f.to_vec();
    base.resize(order + 1, Integer::new());
    while e > 0 {
        if e & 1 == 1 {
            result = convolve(&result, &base, order);
        }
        e >>= 1;
        if e > 0 {
            base = convolve(&base, &base, order);
        }
    }
    result
}

/// Slow path: dense convolution, dense inversion and binary exponentiation.
/// Kept as a cross-check on [`eta_quotient_coeffs`].
pub fn eta_quotient_coeffs_dense(spec: &EtaQuotient, order: u64) -> CoeffTable {
    let n = order as usize;
    let mut coeffs = vec![Integer::new(); n + 1];
    coeffs[0] = Integer::from(1);
    for (m, d) in spec.factors() {
        let euler = euler_coeffs(m, order);
        let base = if d < 0 { invert(&euler, n) } else { euler };
        let factor = power(&base, d.unsigned_abs(), n);
        coeffs = convolve(&coeffs, &factor, n);
    }
    CoeffTable { spec: spec.clone(), coeffs }
}

/// `p(0..=N)` by Euler's pentagonal recurrence.
pub fn partition_numbers(order: u64) -> Vec<Integer> {
    eta_quotient_coeffs(&EtaQuotient::partitions(), order).coeffs
}

/// `a_p(n)` by direct enumeration with the default cap of 40.
pub fn enumerate_colored(p: u64, n: u64) -> Result<Integer> {
    enumerate_colored_capped(p, n, DEFAULT_ENUMERATION_CAP)
}

/// Counts partitions of `n` in which every part divisible by `p` takes one
/// of two colors. A part size divisible by `p` used `j` times contributes
/// `j + 1` color multisets.
pub fn enumerate_colored_capped(p: u64, n: u64, cap: u64) -> Result<Integer> {
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    if p == 0 {
        return Err(Error::InvalidArgument("p must be positive".into()));
    }
    fn walk(remaining: u64, largest: u64, p: u64) -> Integer {
        if remaining == 0 {
            return Integer::from(1);
        }
        let mut total = Integer::new();
        for part in (1..=largest.min(remaining)).rev() {
            for count in 1..=remaining / part {
                let weight = if part % p == 0 { count + 1 } else { 1 };
                total += walk(remaining - count * part, part - 1, p) * weight;
            }
        }
        total
    }
    Ok(walk(n, n, p))
}
