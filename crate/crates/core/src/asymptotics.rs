//! Asymptotics of `a_p(n)`: the leading Bessel form, the four-term log
//! expansion with its `1/√n` constant, the Turán-type inequality for `p(n)`
//! and residual scans for primes where no exact series is available.

use std::fmt;

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::{AddAssignRound, DivAssignRound, Pow};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::besselgamma::{bessel_i_series, BesselOrder};
use crate::error::{Error, Result};
use crate::etaquotient::EtaQuotient;
use crate::numeric::{is_prime, pi, pi_rounded, BigReal};
use crate::oracle::{eta_quotient_coeffs, partition_numbers};
use crate::rademacher::a_p;

const GUARD: u32 = 32;

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn one_plus_inv(p: u64, prec: u32) -> Float {
    Float::with_val(prec, Rational::from((p + 1, p)))
}

/// `c_p = 135 / (π √(1 + 1/p)) + π √((1 + p)³ / p)`.
pub fn c_p(p: u64, precision_bits: u32) -> Result<BigReal> {
    if p == 0 {
        return Err(Error::InvalidArgument("c_p needs p ≥ 1".into()));
    }
    let work = precision_bits + GUARD;
    let pi = pi(work);
    let first = Float::with_val(work, 135) / (pi.clone() * one_plus_inv(p, work).sqrt());
    let cube = Float::with_val(work, Rational::from((Integer::from(p + 1).pow(3), p)));
    let second = pi * cube.sqrt();
    Ok(BigReal::new(Float::with_val(precision_bits, first + second)))
}

/// `-c_p / (24 √6)`, the predicted `1/√n` coefficient of `log a_p(n)`.
pub fn predicted_c_coefficient(p: u64, precision_bits: u32) -> Result<BigReal> {
    let work = precision_bits + GUARD;
    let c = Float::with_val(work, c_p(p, work)?.value());
    let denom = Float::with_val(work, 6).sqrt() * 24u32;
    Ok(BigReal::new(Float::with_val(precision_bits, -(c / denom))))
}

/// `15 / (8π) + π / 16`, the `p = 2` reduction of `c_p / (24√6)`.
pub fn mauth_coefficient(precision_bits: u32) -> BigReal {
    let work = precision_bits + GUARD;
    let pi = pi(work);
    let value = Float::with_val(work, 15) / (pi.clone() * 8u32) + pi / 16u32;
    BigReal::new(Float::with_val(precision_bits, value))
}

/// `2π √p (1 + 1/p) / (24n - p - 1) · I_2((π/6) √((1 + 1/p)(24n - p - 1)))`.
pub fn leading_asymptotic(p: u64, n: u64, precision_bits: u32) -> Result<BigReal> {
    check_prime(p)?;
    if 24 * n <= p + 1 {
        return Err(Error::OutOfRange { n, delta2: -(p as i64) - 1 });
    }
    let work = precision_bits + GUARD;
    let pi = pi(work);
    let shifted = 24 * n - p - 1;
    let ratio = one_plus_inv(p, work);
    let arg = Float::with_val(work, &ratio * shifted).sqrt() * &pi / 6u32;
    let bessel = bessel_i_series(BesselOrder::integer(2), &arg, work)?.into_inner();
    let sqrt_p = Float::with_val(work, p).sqrt();
    let value = pi * 2u32 * sqrt_p * ratio / shifted * bessel;
    Ok(BigReal::new(Float::with_val(precision_bits, value)))
}

/// The four terms of the expansion of `log a_p(n)`:
/// `π √(2n(1 + 1/p)/3)`, `-(5/4) log n`, `log(2√(3p)(1 + 1/p)^{3/4} / 24^{5/4})`
/// and `-c_p / (24 √(6n))`.
pub fn log_asymptotic_terms(p: u64, n: u64, precision_bits: u32) -> Result<[BigReal; 4]> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidArgument("log asymptotics need p ≥ 1 and n ≥ 1".into()));
    }
    let work = precision_bits + GUARD;
    let ratio = one_plus_inv(p, work);
    let sqrt_n = Float::with_val(work, n).sqrt();

    let exponential = (Float::with_val(work, &ratio * 2u32) * n / 3u32).sqrt() * pi(work);
    let power = -(Float::with_val(work, n).ln() * 5u32 / 4u32);
    let numer = Float::with_val(work, 3 * p).sqrt() * 2u32 * ratio.pow(0.75f64);
    let denom = Float::with_val(work, 24).pow(1.25f64);
    let constant = (numer / denom).ln();
    let coefficient = Float::with_val(work, predicted_c_coefficient(p, work)?.value());
    let correction = coefficient / sqrt_n;

    Ok([exponential, power, constant, correction].map(|t| BigReal::new(Float::with_val(precision_bits, t))))
}

fn sum_terms(terms: &[BigReal], precision_bits: u32) -> BigReal {
    let mut total = Float::new(precision_bits + GUARD);
    for t in terms {
        total += t.value();
    }
    BigReal::new(Float::with_val(precision_bits, total))
}

/// Four-term asymptotic value of `log a_p(n)` (natural logarithm).
pub fn log_asymptotic(p: u64, n: u64, precision_bits: u32) -> Result<BigReal> {
    let terms = log_asymptotic_terms(p, n, precision_bits + GUARD)?;
    Ok(sum_terms(&terms, precision_bits))
}

/// The expansion without its `1/√n` term; residuals are measured against it.
pub fn log_asymptotic_three_terms(p: u64, n: u64, precision_bits: u32) -> Result<BigReal> {
    let terms = log_asymptotic_terms(p, n, precision_bits + GUARD)?;
    Ok(sum_terms(&terms[..3], precision_bits))
}

/// `π √n - (5/4) log n - log 8 - (15/(8π) + π/16) / √n`, the `p = 2` form.
pub fn mauth_log_asymptotic(n: u64, precision_bits: u32) -> Result<BigReal> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let work = precision_bits + GUARD;
    let sqrt_n = Float::with_val(work, n).sqrt();
    let coefficient = Float::with_val(work, mauth_coefficient(work).value());
    let value = Float::with_val(work, &sqrt_n * pi(work)) - Float::with_val(work, n).ln() * 5u32 / 4u32
        - Float::with_val(work, 8).ln()
        - coefficient / sqrt_n;
    Ok(BigReal::new(Float::with_val(precision_bits, value)))
}

/// `a · 8 n^{5/4} e^{-π √n}` for a given value `a` of `a_2(n)`.
pub fn kotesovec_ratio_of(value: &Integer, n: u64, precision_bits: u32) -> Result<BigReal> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let work = precision_bits + GUARD;
    let scale = Float::with_val(work, n).pow(1.25f64) * 8u32;
    let decay = (-(Float::with_val(work, n).sqrt() * pi(work))).exp();
    let ratio = Float::with_val(work, value) * scale * decay;
    Ok(BigReal::new(Float::with_val(precision_bits, ratio)))
}

/// `a_2(n) · 8 n^{5/4} e^{-π √n}` with `a_2(n)` from the exact engine.
pub fn kotesovec_ratio(n: u64, precision_bits: u32) -> Result<BigReal> {
    let value = a_p(2, n)?;
    kotesovec_ratio_of(&value, n, precision_bits)
}

/// Bounds `lo ≤ π/√(24 n³) ≤ hi` as exact rationals at `bits` precision.
fn turan_gap_enclosure(n: u64, bits: u32) -> (Rational, Rational) {
    let cube = Integer::from(n).pow(3) * 24u32;
    let enclose = |round_num: Round, round_den: Round| {
        let mut root = Float::with_val_round(bits, &cube, round_den).0;
        root.sqrt_round(round_den);
        let mut x = pi_rounded(bits, round_num);
        x.div_assign_round(&root, round_num);
        x.to_rational().expect("finite")
    };
    (enclose(Round::Down, Round::Up), enclose(Round::Up, Round::Down))
}

/// Decides `lo < r` or `r < hi` style comparisons: `Some(true)` if `value`
/// is certainly below the enclosed quantity, `Some(false)` if certainly at
/// or above it, `None` if the enclosure straddles it.
fn below(value: &Rational, lo: &Rational, hi: &Rational) -> Option<bool> {
    if value < lo {
        Some(true)
    } else if value >= hi {
        Some(false)
    } else {
        None
    }
}

/// Turán-type inequality for partition numbers, given a table with `p(n+1)`:
/// `(1 + x - 1/n²) p(n-1) p(n+1) < p(n)² < (1 + x) p(n-1) p(n+1)` with
/// `x = π / (√24 n^{3/2})`, valid for `n ≥ 120` (it fails at `n = 119`).
///
/// Everything except `x` is exact. `x` is enclosed by rationals that are
/// tightened until both comparisons are decided; since `x` is transcendental
/// it never equals the rational it is compared with, so refinement terminates.
pub fn turan_check_with(partitions: &[Integer], n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Turán check needs n ≥ 2, got {n}")));
    }
    let idx = n as usize;
    if partitions.len() <= idx + 1 {
        return Err(Error::InvalidArgument(format!("partition table too short for n = {n}")));
    }
    let product = Integer::from(&partitions[idx - 1] * &partitions[idx + 1]);
    let square = Integer::from(partitions[idx].square_ref());
    // r = p(n)² / (p(n-1) p(n+1)) - 1; the inequality reads x - 1/n² < r < x.
    let r = Rational::from((square, product)) - 1u32;
    let r_shifted = &r + Rational::from((1, n * n));

    let mut bits = 128;
    loop {
        let (lo, hi) = turan_gap_enclosure(n, bits);
        let upper = below(&r, &lo, &hi);
        let lower = below(&r_shifted, &lo, &hi).map(|b| !b);
        match (upper, lower) {
            (Some(false), _) | (_, Some(false)) => return Ok(false),
            (Some(true), Some(true)) => return Ok(true),
            _ => bits *= 2,
        }
    }
}

/// [`turan_check_with`] on a freshly built partition table.
pub fn turan_check(n: u64) -> Result<bool> {
    let table = partition_numbers(n + 1);
    turan_check_with(&table, n)
}

/// Where exact values in a report came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueSource {
    Series,
    Oracle,
}

impl fmt::Display for ValueSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueSource::Series => "series",
            ValueSource::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSample {
    pub n: u64,
    pub exact_log: BigReal,
    /// Three-term prediction; the `1/√n` term is what the fit recovers.
    pub predicted_log: BigReal,
    pub residual_times_sqrt_n: BigReal,
}

pub const FIT_PROTOCOL: &str = "residual = log a_p(n) minus the first three terms of the expansion; \
fitted coefficient = least-squares constant (the mean) of residual*sqrt(n) over the largest-n half of the samples";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub p: u64,
    pub source: ValueSource,
    pub samples: Vec<AsymptoticSample>,
    pub fitted_c_coefficient: BigReal,
    pub predicted_c_coefficient: BigReal,
    pub fit_protocol: String,
}

impl AsymptoticReport {
    /// Samples the fit is taken over.
    pub fn fit_samples(&self) -> &[AsymptoticSample] {
        &self.samples[self.samples.len() / 2..]
    }

    /// `fitted / predicted - 1`.
    pub fn relative_error(&self) -> f64 {
        self.fitted_c_coefficient.to_f64() / self.predicted_c_coefficient.to_f64() - 1.0
    }

    /// Range (max - min) of `residual·√n` over the lower and the upper half of the samples.
    pub fn half_spreads(&self) -> (f64, f64) {
        let mid = self.samples.len() / 2;
        let spread = |s: &[AsymptoticSample]| {
            let vals = s.iter().map(|x| x.residual_times_sqrt_n.to_f64());
            let max = vals.clone().fold(f64::NEG_INFINITY, f64::max);
            let min = vals.fold(f64::INFINITY, f64::min);
            max - min
        };
        (spread(&self.samples[..mid]), spread(&self.samples[mid..]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,exact_log,predicted_log,residual_times_sqrt_n\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", s.n, s.exact_log, s.predicted_log, s.residual_times_sqrt_n));
        }
        out
    }
}

/// Builds a report from exact values `(n, a_p(n))`.
pub fn asymptotic_report(p: u64, values: &[(u64, Integer)], source: ValueSource, precision_bits: u32) -> Result<AsymptoticReport> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("report needs at least one sample".into()));
    }
    let mut values = values.to_vec();
    values.sort_by_key(|v| v.0);
    let work = precision_bits + GUARD;
    let mut samples = Vec::with_capacity(values.len());
    for (n, value) in &values {
        if *value <= 0 {
            return Err(Error::InvalidArgument(format!("a_{p}({n}) = {value} has no logarithm")));
        }
        let exact_log = Float::with_val(work, value).ln();
        let predicted = Float::with_val(work, log_asymptotic_three_terms(p, *n, work)?.value());
        let residual = Float::with_val(work, &exact_log - &predicted) * Float::with_val(work, *n).sqrt();
        samples.push(AsymptoticSample {
            n: *n,
            exact_log: BigReal::new(Float::with_val(precision_bits, exact_log)),
            predicted_log: BigReal::new(Float::with_val(precision_bits, predicted)),
            residual_times_sqrt_n: BigReal::new(Float::with_val(precision_bits, residual)),
        });
    }
    let top = &samples[samples.len() / 2..];
    let mut mean = Float::new(work);
    for s in top {
        mean.add_assign_round(s.residual_times_sqrt_n.value(), Round::Nearest);
    }
    mean /= top.len() as u64;
    Ok(AsymptoticReport {
        p,
        source,
        samples,
        fitted_c_coefficient: BigReal::new(Float::with_val(precision_bits, mean)),
        predicted_c_coefficient: predicted_c_coefficient(p, precision_bits)?,
        fit_protocol: FIT_PROTOCOL.to_string(),
    })
}

/// Sample points `step, 2·step, …, ≤ N` with `step = max(1, N/64)`.
pub fn sample_grid(upper: u64) -> Vec<u64> {
    let step = (upper / 64).max(1);
    (1..=upper / step).map(|i| i * step).collect()
}

/// `count` points spaced evenly in `log n` between `lo` and `hi`, rounded and deduplicated.
pub fn log_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count <= 1 || lo >= hi {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut grid: Vec<u64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u64)
        .collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    grid.dedup();
    grid
}

/// Report for an admissible prime with values from the exact engine.
/// Sample points are evaluated in parallel; results are assembled in order.
pub fn series_report(p: u64, ns: &[u64], precision_bits: u32) -> Result<AsymptoticReport> {
    let values: Vec<(u64, Integer)> = ns.par_iter().map(|&n| a_p(p, n).map(|v| (n, v))).collect::<Result<_>>()?;
    asymptotic_report(p, &values, ValueSource::Series, precision_bits)
}

/// Residual scan for a prime `p > 23`, with `a_p(n)` from the q-series oracle
/// on [`sample_grid`]`(N)`.
pub fn conjecture_scan(p: u64, upper: u64, precision_bits: u32) -> Result<AsymptoticReport> {
    check_prime(p)?;
    if p <= 23 {
        return Err(Error::InvalidArgument(format!("conjecture scan is for primes p > 23, got {p}")));
    }
    if upper == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let table = eta_quotient_coeffs(&EtaQuotient::two_color(p), upper);
    let values: Vec<(u64, Integer)> = sample_grid(upper).into_iter().map(|n| (n, table.coeffs[n as usize].clone())).collect();
    asymptotic_report(p, &values, ValueSource::Oracle, precision_bits)
}

/// `|a - b| ≤ 2^{-bits} max(|a|, |b|)`.
pub fn agree_to_bits(a: &Float, b: &Float, bits: u32) -> bool {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    diff <= scale >> bits
}
