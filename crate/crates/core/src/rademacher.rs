//! Rademacher-type series for the coefficients `g(n)` of admissible eta-quotients:
//!
//! ```text
//! g(n) = 2π Σ_{l ∈ L>0} Δ4(l) (Δ3(l)/(24n+Δ2))^{ν/2}
//!            Σ_{k ≡ l (mod L)} I_ν(π √(Δ3(l)(24n+Δ2)) / (6k)) Â_k(n) / k,     ν = Δ1 + 1
//! ```
//!
//! A truncation at `k ≤ K` is paired with a rigorous bound on the omitted
//! tail (from `|Â_k| ≤ k` and `I_ν(y) ≤ (y/2)^ν e^{y²/4} / Γ(ν+1)`), and the
//! nearest integer is certified once distance plus tail is below 1/4.
//!
//! Each term is evaluated at the precision its magnitude needs; the sum is
//! folded by residue class `l` ascending, then `k` ascending, so results are
//! bit-identical regardless of the rayon thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::{AddAssignRound, AssignRound, DivAssignRound, MulAssignRound, Pow, PowAssignRound};
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::besselgamma::{bessel_i_series, BesselOrder};
use crate::error::{Error, Result};
use crate::etaquotient::{check_admissible, delta_profile, DeltaProfile, EtaQuotient};
use crate::expsums::a_hat_paired;
use crate::numeric::{ceil_sqrt, pi, pi_rounded, totient, BigReal, ExactRational};
use crate::oracle::eta_quotient_coeffs;
use crate::ADMISSIBLE_PRIMES;

/// Extra bits carried below the unit digit on the first attempt.
const START_GUARD_BITS: u32 = 96;
/// Never carry fewer bits than this below the unit digit.
const MIN_GUARD_BITS: i64 = 16;
const TAIL_PRECISION: u32 = 64;

/// A truncated series evaluation of `g(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvaluation {
    pub value: BigReal,
    pub truncation_k: u64,
    /// Upper bound on the absolute value of the omitted terms `k > K`.
    pub tail_bound: BigReal,
    /// Nearest integer, present iff `|value - nearest| + tail_bound < 1/4`.
    #[serde(with = "optional_integer")]
    pub certified_integer: Option<Integer>,
    pub per_l_contributions: BTreeMap<u64, BigReal>,
    /// Bits carried for the leading term.
    pub precision_bits: u32,
    /// `|value - nearest integer|`.
    pub int_distance: BigReal,
}

mod optional_integer {
    use rug::Integer;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Integer>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(i) => s.serialize_some(&i.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Integer>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| t.parse::<Integer>().map_err(de::Error::custom))
            .transpose()
    }
}

/// Limits for [`exact_coefficient_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub max_k: u64,
    /// Floor for the working precision; the engine may go higher.
    pub min_precision: u32,
    pub max_precision: u32,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { max_k: 1 << 16, min_precision: 0, max_precision: 1 << 22 }
    }
}

/// One summand of the truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTerm {
    pub k: u64,
    pub l: u64,
    pub value: BigReal,
    /// The summand with `Â_k(n)/k` replaced by 1, which dominates `|value|`.
    pub envelope: BigReal,
}

struct Setup {
    spec: EtaQuotient,
    profile: DeltaProfile,
    nu: BesselOrder,
    n: u64,
    /// `24n + Δ2 > 0`.
    shifted: u64,
    /// log2 of `e^{y}` for the largest Bessel argument.
    lead_bits: i64,
}

impl Setup {
    fn new(spec: &EtaQuotient, n: u64) -> Result<Self> {
        let verdict = check_admissible(spec);
        if !verdict.is_admissible() {
            return Err(Error::Inadmissible(verdict));
        }
        let profile = delta_profile(spec);
        let shifted = 24 * n as i64 + profile.delta2;
        if n < 1 || shifted <= 0 {
            return Err(Error::OutOfRange { n, delta2: profile.delta2 });
        }
        let two_nu = u32::try_from(spec.twice_bessel_order()).expect("Δ1 > 0");
        let shifted = shifted as u64;
        let d3max = profile.delta3_max().expect("admissible profile has L>0").to_f64();
        let y_max = std::f64::consts::PI * (d3max * shifted as f64).sqrt() / 6.0;
        let lead_bits = (y_max / std::f64::consts::LN_2).ceil() as i64;
        Ok(Setup { spec: spec.clone(), profile, nu: BesselOrder::from_twice(two_nu), n, shifted, lead_bits })
    }

    fn nu_f64(&self) -> f64 {
        self.nu.as_f64()
    }

    fn start_precision(&self) -> u32 {
        (self.lead_bits.max(0) as u32) + START_GUARD_BITS
    }

    /// Bits below the unit digit implied by a working precision.
    fn guard_bits(&self, precision_bits: u32) -> i64 {
        (i64::from(precision_bits) - self.lead_bits).max(MIN_GUARD_BITS)
    }

    fn y_f64(&self, l: u64, k: u64) -> f64 {
        let d3 = self.profile.delta3_at(l).to_f64();
        std::f64::consts::PI * (d3 * self.shifted as f64).sqrt() / (6.0 * k as f64)
    }

    /// log2 of an upper bound for the term magnitude (with `|Â_k| ≤ φ(k)`).
    fn log2_term_bound(&self, l: u64, k: u64) -> f64 {
        let nu = self.nu_f64();
        let d3 = self.profile.delta3_at(l).to_f64();
        let d4 = self.profile.delta4_sq_at(l).to_f64().sqrt();
        let y = self.y_f64(l, k);
        let log2_pref = (2.0 * std::f64::consts::PI * d4).log2() + 0.5 * nu * (d3 / self.shifted as f64).log2();
        let ln_gamma = ln_gamma_half(self.nu.twice() + 2);
        let ln_small = nu * (y / 2.0).ln() + y * y / 4.0 - ln_gamma;
        let log2_bessel = (y.min(ln_small)) / std::f64::consts::LN_2;
        log2_pref + log2_bessel + (totient(k) as f64 / k as f64).log2()
    }
}

fn ln_gamma_half(twice_z: u32) -> f64 {
    // Γ(z) via the same recurrence as gamma_half, in f64 logs.
    let mut acc = if twice_z % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    let mut z2 = if twice_z % 2 == 0 { 2 } else { 1 };
    while z2 < twice_z {
        acc += (f64::from(z2) / 2.0).ln();
        z2 += 2;
    }
    acc
}

fn term_precision(setup: &Setup, l: u64, k: u64, guard: i64, truncation: u64) -> u32 {
    let magnitude = setup.log2_term_bound(l, k).ceil() as i64;
    let y = setup.y_f64(l, k);
    let extra = (truncation as f64).log2().ceil() as i64 + (y + 2.0).log2().ceil() as i64 + 16;
    (magnitude + guard + extra).max(64) as u32
}

fn compute_term(setup: &Setup, l: u64, k: u64, prec: u32) -> Result<SeriesTerm> {
    let work = prec + 16;
    let pi = pi(work);
    let d3 = Float::with_val(work, setup.profile.delta3_at(l));
    let d4 = setup.profile.delta4_at(l, work);
    let ratio = Float::with_val(work, &d3 / setup.shifted);
    let exponent = Float::with_val(work, setup.nu.twice()) / 4u32;
    let prefactor = Float::with_val(work, ratio.pow(&exponent)) * d4 * &pi * 2u32;

    let y = Float::with_val(work, &d3 * setup.shifted).sqrt() * &pi / (6 * k);
    let bessel = bessel_i_series(setup.nu, &y, work)?.into_inner();
    let envelope = prefactor * bessel;
    let sum = a_hat_paired(&setup.spec, k, setup.n, work)?.into_inner();
    let value = Float::with_val(work, &envelope * sum) / k;
    Ok(SeriesTerm {
        k,
        l,
        value: BigReal::new(Float::with_val(prec, value)),
        envelope: BigReal::new(Float::with_val(prec, envelope)),
    })
}

fn terms_for(setup: &Setup, truncation: u64, precision_bits: u32) -> Result<Vec<SeriesTerm>> {
    let guard = setup.guard_bits(precision_bits);
    let profile = &setup.profile;
    let positive: Vec<bool> = (1..=profile.lcm).map(|l| *profile.delta3_at(l) > 0).collect();
    (1..=truncation)
        .into_par_iter()
        .filter_map(|k| {
            let l = profile.class_of(k);
            positive[(l - 1) as usize].then_some((k, l))
        })
        .map(|(k, l)| compute_term(setup, l, k, term_precision(setup, l, k, guard, truncation)))
        .collect()
}

/// The summands `k ≤ K` of the series for `g(n)`, in increasing `k`.
pub fn series_terms(spec: &EtaQuotient, n: u64, truncation: u64, precision_bits: u32) -> Result<Vec<SeriesTerm>> {
    if truncation < 1 {
        return Err(Error::ZeroTruncation);
    }
    let setup = Setup::new(spec, n)?;
    terms_for(&setup, truncation, precision_bits)
}

fn mul_up(a: &Float, b: &Float) -> Float {
    let mut r = a.clone();
    r.mul_assign_round(b, Round::Up);
    r
}

fn div_up(a: &Float, b: &Float) -> Float {
    let mut r = a.clone();
    r.div_assign_round(b, Round::Up);
    r
}

fn rational_up(q: &ExactRational) -> Float {
    let mut r = Float::new(TAIL_PRECISION);
    r.assign_round(q, Round::Up);
    r
}

/// Rigorous upper bound on `Σ_{k > K} |term_k|`, computed with upward rounding.
///
/// For `k > K` in class `l` the summand is at most
/// `2π Δ4 (π Δ3 / (12k))^ν e^{y_{k1}²/4} / Γ(ν+1)` where `k1` is the first
/// such `k`, and `Σ_{j≥0} (k1 + jL)^{-ν} ≤ k1^{-ν} + k1^{1-ν} / (L(ν-1))`.
fn tail_bound(setup: &Setup, truncation: u64) -> Float {
    let prec = TAIL_PRECISION;
    let profile = &setup.profile;
    let lcm = profile.lcm;
    let two_nu = setup.nu.twice();
    let nu = Float::with_val(prec, two_nu) / 2u32;
    let nu_minus_one = Float::with_val(prec, two_nu - 2) / 2u32;
    let pi_up = pi_rounded(prec, Round::Up);
    let mut gamma_down = Float::with_val(prec, two_nu + 2) / 2u32;
    gamma_down.gamma_round(Round::Down);
    debug_assert!(gamma_down > 0);

    let mut total = Float::new(prec);
    for &l in &profile.l_pos {
        let first = truncation + 1 + (l + lcm - (truncation + 1) % lcm) % lcm;
        debug_assert_eq!(profile.class_of(first), l);
        let k1 = Float::with_val(prec, first);
        let d3 = rational_up(profile.delta3_at(l));
        let mut d4 = rational_up(profile.delta4_sq_at(l));
        d4.sqrt_round(Round::Up);

        // y1 = π √(Δ3 N') / (6 k1), rounded up.
        let mut radicand = rational_up(&ExactRational::from(profile.delta3_at(l) * setup.shifted));
        radicand.sqrt_round(Round::Up);
        let y1 = div_up(&mul_up(&pi_up, &radicand), &Float::with_val(prec, 6 * first));
        let mut growth = div_up(&mul_up(&y1, &y1), &Float::with_val(prec, 4));
        growth.exp_round(Round::Up);

        // (π Δ3 / 12)^ν
        let mut base = div_up(&mul_up(&pi_up, &d3), &Float::with_val(prec, 12));
        base.pow_assign_round(&nu, Round::Up);

        let mut constant = mul_up(&mul_up(&pi_up, &Float::with_val(prec, 2)), &d4);
        constant = mul_up(&constant, &base);
        constant = mul_up(&constant, &growth);
        constant = div_up(&constant, &gamma_down);

        // k1^{-ν} + k1^{1-ν} / (L (ν - 1))
        let mut head = k1.clone();
        head.pow_assign_round(&Float::with_val(prec, -&nu), Round::Up);
        let mut rest = k1;
        rest.pow_assign_round(&Float::with_val(prec, -&nu_minus_one), Round::Up);
        let spread = Float::with_val(prec, &nu_minus_one * lcm);
        let rest = div_up(&rest, &spread);
        let mut comparison = head;
        comparison.add_assign_round(&rest, Round::Up);

        total.add_assign_round(&mul_up(&constant, &comparison), Round::Up);
    }
    total
}

/// Sum of the series over `k ≤ K` at the given working precision, with its
/// tail bound and, when the certificate holds, the exact integer.
pub fn coefficient_series(spec: &EtaQuotient, n: u64, truncation: u64, precision_bits: u32) -> Result<SeriesEvaluation> {
    if truncation < 1 {
        return Err(Error::ZeroTruncation);
    }
    let setup = Setup::new(spec, n)?;
    evaluate(&setup, truncation, precision_bits)
}

fn evaluate(setup: &Setup, truncation: u64, precision_bits: u32) -> Result<SeriesEvaluation> {
    let guard = setup.guard_bits(precision_bits);
    let acc_prec = (setup.lead_bits.max(0) + guard + 32) as u32;
    let terms = terms_for(setup, truncation, precision_bits)?;

    let mut per_class: BTreeMap<u64, Float> = BTreeMap::new();
    for term in &terms {
        *per_class.entry(term.l).or_insert_with(|| Float::new(acc_prec)) += term.value.value();
    }
    let mut value = Float::new(acc_prec);
    for contribution in per_class.values() {
        value += contribution;
    }

    let tail = tail_bound(setup, truncation);
    let nearest = Float::with_val(acc_prec, value.round_ref());
    let distance = Float::with_val(acc_prec, &value - &nearest).abs();
    let certified = Float::with_val(acc_prec, &distance + &tail) < 0.25;
    let certified_integer = certified.then(|| nearest.to_integer().expect("finite"));

    Ok(SeriesEvaluation {
        value: BigReal::new(value),
        truncation_k: truncation,
        tail_bound: BigReal::new(tail),
        certified_integer,
        per_l_contributions: per_class.into_iter().map(|(l, v)| (l, BigReal::new(v))).collect(),
        precision_bits: (setup.lead_bits.max(0) + guard) as u32,
        int_distance: BigReal::new(distance),
    })
}

/// Adaptive driver: starts at `K = max(16, ⌈√(24n+Δ2)⌉)` and the leading-term
/// precision plus 96 guard bits, doubling `K` while the tail is the obstacle
/// and the precision otherwise, until the certificate holds.
pub fn exact_coefficient_with(spec: &EtaQuotient, n: u64, options: &EngineOptions) -> Result<SeriesEvaluation> {
    let setup = Setup::new(spec, n)?;
    let mut truncation = ceil_sqrt(setup.shifted).max(16);
    let mut precision = setup.start_precision().max(options.min_precision);
    loop {
        if truncation > options.max_k {
            return Err(Error::ResourceCap { max_k: options.max_k });
        }
        if precision > options.max_precision {
            return Err(Error::InvalidArgument(format!(
                "precision cap {} bits exceeded",
                options.max_precision
            )));
        }
        let eval = evaluate(&setup, truncation, precision)?;
        if eval.certified_integer.is_some() {
            return Ok(eval);
        }
        if eval.tail_bound.to_f64() >= 0.125 {
            truncation *= 2;
        } else {
            precision *= 2;
        }
    }
}

/// The exact coefficient `g(n)` of an admissible eta-quotient.
pub fn exact_coefficient(spec: &EtaQuotient, n: u64) -> Result<Integer> {
    let eval = exact_coefficient_with(spec, n, &EngineOptions::default())?;
    Ok(eval.certified_integer.expect("driver returns certified evaluations"))
}

/// `a_p(n)` together with the series evaluation that produced it.
///
/// `evaluation` is `None` only for `(p, n) = (23, 1)`: there `24n + Δ2 = 0`,
/// outside the series range, and the value comes from the q-series oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoColorValue {
    pub value: Integer,
    pub evaluation: Option<SeriesEvaluation>,
}

pub fn a_p_with(p: u64, n: u64, options: &EngineOptions) -> Result<TwoColorValue> {
    if !ADMISSIBLE_PRIMES.contains(&p) {
        return Err(Error::PrimeNotAdmissible(p));
    }
    if n < 1 {
        return Err(Error::OutOfRange { n, delta2: -(p as i64) - 1 });
    }
    let spec = EtaQuotient::two_color(p);
    if 24 * n <= p + 1 {
        let table = eta_quotient_coeffs(&spec, n);
        return Ok(TwoColorValue { value: table.coeffs[n as usize].clone(), evaluation: None });
    }
    let eval = exact_coefficient_with(&spec, n, options)?;
    let value = eval.certified_integer.clone().expect("certified");
    Ok(TwoColorValue { value, evaluation: Some(eval) })
}

/// `a_p(n)` for `p ≤ 23` prime and `n ≥ 1`.
pub fn a_p(p: u64, n: u64) -> Result<Integer> {
    Ok(a_p_with(p, n, &EngineOptions::default())?.value)
}
