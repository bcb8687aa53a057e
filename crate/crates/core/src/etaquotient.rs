//! Eta-quotients `G(q) = Π_r (q^{m_r}; q^{m_r})_∞^{δ_r}` and their Δ-profile.
//!
//! All profile quantities are exact rationals. `Δ4(l)` is generally
//! irrational, so the profile stores `Δ4(l)²` and callers take the square
//! root at whatever precision they work in.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gcd, lcm, ExactRational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EtaQuotient {
    m: Vec<u64>,
    delta: Vec<i64>,
}

impl EtaQuotient {
    pub fn new(m: Vec<u64>, delta: Vec<i64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidEtaQuotient("no factors".into()));
        }
        if m.len() != delta.len() {
            return Err(Error::InvalidEtaQuotient(format!(
                "{} bases but {} exponents",
                m.len(),
                delta.len()
            )));
        }
        if let Some(bad) = m.iter().find(|&&x| x == 0) {
            return Err(Error::InvalidEtaQuotient(format!("base {bad} is not positive")));
        }
        if delta.contains(&0) {
            return Err(Error::InvalidEtaQuotient("zero exponent".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = m.iter().find(|x| !seen.insert(**x)) {
            return Err(Error::InvalidEtaQuotient(format!("base {dup} repeated")));
        }
        Ok(EtaQuotient { m, delta })
    }

    /// `1 / ((q;q)_∞ (q^p;q^p)_∞)`, the generating function of `a_p(n)`.
    pub fn two_color(p: u64) -> Self {
        assert!(p >= 2, "two_color needs p >= 2");
        EtaQuotient { m: vec![1, p], delta: vec![-1, -1] }
    }

    /// `1 / (q;q)_∞`, the generating function of `p(n)`.
    pub fn partitions() -> Self {
        EtaQuotient { m: vec![1], delta: vec![-1] }
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn delta(&self) -> &[i64] {
        &self.delta
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.m.iter().copied().zip(self.delta.iter().copied())
    }

    /// The reciprocal quotient (all exponents negated).
    pub fn negated(&self) -> Self {
        EtaQuotient { m: self.m.clone(), delta: self.delta.iter().map(|d| -d).collect() }
    }

    pub fn lcm(&self) -> u64 {
        self.m.iter().fold(1, |acc, &x| lcm(acc, x))
    }

    pub fn exponent_sum(&self) -> i64 {
        self.delta.iter().sum()
    }

    /// `2ν` for the Bessel order `ν = Δ1 + 1 = 1 - Σδ/2`.
    pub fn twice_bessel_order(&self) -> i64 {
        2 - self.exponent_sum()
    }

    pub fn delta1(&self) -> ExactRational {
        ExactRational::from((-self.exponent_sum(), 2))
    }

    pub fn delta2(&self) -> i64 {
        self.factors().map(|(m, d)| m as i64 * d).sum()
    }

    /// `Δ3(k) = -Σ_r gcd(m_r, k)² δ_r / m_r`, defined for every `k ≥ 1`.
    pub fn delta3(&self, k: u64) -> ExactRational {
        self.factors().fold(ExactRational::new(), |acc, (m, d)| {
            let g = gcd(m, k);
            acc - ExactRational::from(((g * g) as i64 * d, m as i64))
        })
    }

    /// `Δ4(k)² = Π_r (gcd(m_r, k) / m_r)^{δ_r}`.
    pub fn delta4_squared(&self, k: u64) -> ExactRational {
        self.factors().fold(ExactRational::from(1), |acc, (m, d)| {
            let ratio = ExactRational::from((gcd(m, k), m));
            let power = ExactRational::from(ratio.pow(d as i32));
            acc * power
        })
    }

    fn gcd_signature(&self, l: u64) -> Vec<u64> {
        self.m.iter().map(|&m| gcd(m, l)).collect()
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, d)) in self.factors().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{m}^{d}")?;
        }
        Ok(())
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    /// Parses `"m^delta*m^delta..."`, e.g. `"1^-1*5^-1"`.
    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: String| Error::Parse { input: s.to_string(), reason };
        let mut m = Vec::new();
        let mut delta = Vec::new();
        for part in s.trim().split('*') {
            let (base, exp) = part
                .trim()
                .split_once('^')
                .ok_or_else(|| fail(format!("factor {part:?} lacks '^'")))?;
            m.push(base.trim().parse::<u64>().map_err(|e| fail(format!("base {base:?}: {e}")))?);
            delta.push(exp.trim().parse::<i64>().map_err(|e| fail(format!("exponent {exp:?}: {e}")))?);
        }
        EtaQuotient::new(m, delta).map_err(|e| fail(e.to_string()))
    }
}

impl TryFrom<String> for EtaQuotient {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<EtaQuotient> for String {
    fn from(value: EtaQuotient) -> Self {
        value.to_string()
    }
}

/// Δ-quantities for one eta-quotient. Per-`l` vectors are indexed by `l - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaProfile {
    pub delta1: ExactRational,
    pub delta2: i64,
    pub lcm: u64,
    pub delta3: Vec<ExactRational>,
    pub delta4_sq: Vec<ExactRational>,
    pub l_pos: Vec<u64>,
    pub l_nonpos: Vec<u64>,
}

impl DeltaProfile {
    /// Residue class `l ∈ {1..L}` of `k`.
    pub fn class_of(&self, k: u64) -> u64 {
        (k - 1) % self.lcm + 1
    }

    pub fn delta3_at(&self, l: u64) -> &ExactRational {
        &self.delta3[(l - 1) as usize]
    }

    pub fn delta4_sq_at(&self, l: u64) -> &ExactRational {
        &self.delta4_sq[(l - 1) as usize]
    }

    /// `Δ4(l)` as the positive square root of the stored exact square.
    pub fn delta4_at(&self, l: u64, precision_bits: u32) -> Float {
        Float::with_val(precision_bits, self.delta4_sq_at(l)).sqrt()
    }

    /// Largest `Δ3(l)` over `l ∈ L_{>0}`, if any.
    pub fn delta3_max(&self) -> Option<&ExactRational> {
        self.l_pos.iter().map(|&l| self.delta3_at(l)).max()
    }
}

pub fn delta_profile(spec: &EtaQuotient) -> DeltaProfile {
    let lcm = spec.lcm();
    let mut delta3 = Vec::with_capacity(lcm as usize);
    let mut delta4_sq = Vec::with_capacity(lcm as usize);
    let mut l_pos = Vec::new();
    let mut l_nonpos = Vec::new();
    for l in 1..=lcm {
        let d3 = spec.delta3(l);
        if d3 > 0 {
            l_pos.push(l);
        } else {
            l_nonpos.push(l);
        }
        delta3.push(d3);
        delta4_sq.push(spec.delta4_squared(l));
    }
    DeltaProfile { delta1: spec.delta1(), delta2: spec.delta2(), lcm, delta3, delta4_sq, l_pos, l_nonpos }
}

/// Verdict of the admissibility test for the exact series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible,
    FailsDelta1,
    /// `min_r gcd(m_r, l)²/m_r < Δ3(l)/24` at this (smallest) `l`.
    FailsCondition2 { l: u64 },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Admissibility::Admissible => f.write_str("admissible"),
            Admissibility::FailsDelta1 => f.write_str("Δ1 = -Σδ/2 is not positive"),
            Admissibility::FailsCondition2 { l } => {
                write!(f, "condition (2) fails at l = {l}: min_r gcd(m_r,l)²/m_r < Δ3(l)/24")
            }
        }
    }
}

/// Exact admissibility check: `Δ1 > 0` and
/// `min_r gcd(m_r, l)²/m_r ≥ Δ3(l)/24` for all `1 ≤ l ≤ L`.
///
/// Only the first `l` of each gcd-signature is tested, so a failure reports
/// the smallest failing `l`.
pub fn check_admissible(spec: &EtaQuotient) -> Admissibility {
    if spec.exponent_sum() >= 0 {
        return Admissibility::FailsDelta1;
    }
    let mut seen = HashSet::new();
    for l in 1..=spec.lcm() {
        if !seen.insert(spec.gcd_signature(l)) {
            continue;
        }
        let min_ratio = spec
            .m()
            .iter()
            .map(|&m| {
                let g = gcd(m, l);
                ExactRational::from((g * g, m))
            })
            .min()
            .expect("at least one factor");
        if min_ratio < spec.delta3(l) / 24u32 {
            return Admissibility::FailsCondition2 { l };
        }
    }
    Admissibility::Admissible
}
