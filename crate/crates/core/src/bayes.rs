//! Odds, factors and deciban arithmetic.
//!
//! The factor principle: posterior odds = prior odds × factor, where the
//! factor is the ratio of the probabilities of the data under the theory and
//! under its negation. Independent pieces of evidence multiply, so their
//! logarithms (decibans) add.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Odds in favour of a theory, `P / (1 - P)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Odds(f64);

impl Odds {
    pub fn new(ratio: f64) -> Result<Self> {
        if ratio.is_finite() && ratio >= 0.0 {
            Ok(Odds(ratio))
        } else {
            Err(Error::Domain(format!(
                "odds must be finite and >= 0, got {ratio}"
            )))
        }
    }

    pub const fn evens() -> Self {
        Odds(1.0)
    }

    pub fn from_probability(p: f64) -> Result<Self> {
        odds_from_probability(p)
    }

    /// Odds built from the conventional "a:b" pair, i.e. `a / b`.
    pub fn from_pair(on: f64, against: f64) -> Result<Self> {
        if against.is_nan() || against <= 0.0 {
            return Err(Error::Domain(format!(
                "odds denominator must be > 0, got {against}"
            )));
        }
        Odds::new(on / against)
    }

    pub fn ratio(self) -> f64 {
        self.0
    }

    pub fn probability(self) -> f64 {
        self.0 / (1.0 + self.0)
    }

    pub fn apply_factor(self, factor: f64) -> Result<Self> {
        apply_factor(self, factor)
    }

    pub fn apply_decibans(self, evidence: Decibans) -> Result<Self> {
        apply_factor(self, evidence.factor())
    }

    /// Log-odds in decibans ("n decibans up on evens").
    pub fn decibans(self) -> Decibans {
        Decibans(10.0 * self.0.log10())
    }
}

impl fmt::Display for Odds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 >= 1.0 {
            write!(f, "{:.2}:1 on", self.0)
        } else if self.0 > 0.0 {
            write!(f, "{:.2}:1 against", 1.0 / self.0)
        } else {
            write!(f, "0")
        }
    }
}

/// Accepts `a:b` (odds of a to b), `a/b`, or a plain decimal ratio.
impl FromStr for Odds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad odds {s:?}")))
        };
        if let Some((a, b)) = s.split_once(':').or_else(|| s.split_once('/')) {
            Odds::from_pair(num(a)?, num(b)?)
        } else {
            Odds::new(num(s)?)
        }
    }
}

/// Evidence in decibans, `10·log10(factor)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Decibans(pub f64);

impl Decibans {
    pub fn from_factor(factor: f64) -> Result<Self> {
        decibans_from_factor(factor)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn factor(self) -> f64 {
        10f64.powf(self.0 / 10.0)
    }

    pub fn to_half_decibans(self) -> HalfDecibans {
        HalfDecibans::round(2.0 * self.0)
    }
}

impl Add for Decibans {
    type Output = Decibans;
    fn add(self, rhs: Self) -> Self {
        Decibans(self.0 + rhs.0)
    }
}

impl AddAssign for Decibans {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Neg for Decibans {
    type Output = Decibans;
    fn neg(self) -> Self {
        Decibans(-self.0)
    }
}

impl Sum for Decibans {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        Decibans(iter.map(|d| d.0).sum())
    }
}

/// Integer evidence in half-decibans, `20·log10(factor)` rounded to nearest.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct HalfDecibans(pub i64);

impl HalfDecibans {
    /// Nearest integer, ties away from zero.
    pub fn round(value: f64) -> Self {
        HalfDecibans(value.round() as i64)
    }

    pub fn from_factor(factor: f64) -> Result<Self> {
        Ok(HalfDecibans::round(2.0 * decibans_from_factor(factor)?.0))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn decibans(self) -> Decibans {
        Decibans(self.0 as f64 / 2.0)
    }

    pub fn factor(self) -> f64 {
        10f64.powf(self.0 as f64 / 20.0)
    }
}

impl Add for HalfDecibans {
    type Output = HalfDecibans;
    fn add(self, rhs: Self) -> Self {
        HalfDecibans(self.0 + rhs.0)
    }
}

impl AddAssign for HalfDecibans {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sum for HalfDecibans {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        HalfDecibans(iter.map(|d| d.0).sum())
    }
}

impl fmt::Display for HalfDecibans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn odds_from_probability(p: f64) -> Result<Odds> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "probability must lie in [0, 1), got {p}"
        )));
    }
    Ok(Odds(p / (1.0 - p)))
}

pub fn apply_factor(prior: Odds, factor: f64) -> Result<Odds> {
    if !(factor.is_finite() && factor >= 0.0) {
        return Err(Error::Domain(format!(
            "factor must be finite and >= 0, got {factor}"
        )));
    }
    Odds::new(prior.0 * factor)
}

pub fn decibans_from_factor(factor: f64) -> Result<Decibans> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::Domain(format!(
            "factor must be finite and > 0, got {factor}"
        )));
    }
    Ok(Decibans(10.0 * factor.log10()))
}

/// Multiplies the prior by every factor. The product is accumulated in log
/// space so thousands of factors neither overflow nor underflow early.
pub fn combine_independent(factors: &[f64], prior: Odds) -> Result<Odds> {
    let mut total = Decibans::default();
    for &f in factors {
        total += decibans_from_factor(f)?;
    }
    prior.apply_decibans(total)
}

/// Exact odds `p / (1 - p)` for rational `p` in `[0, 1)`.
pub fn exact_odds_from_probability(p: &BigRational) -> Result<BigRational> {
    if p.is_negative() || *p >= BigRational::one() {
        return Err(Error::Domain(format!(
            "probability must lie in [0, 1), got {p}"
        )));
    }
    Ok(p / (BigRational::one() - p))
}

/// Exact `prior × ∏ factors` over the rationals.
pub fn exact_combine(prior: &BigRational, factors: &[BigRational]) -> Result<BigRational> {
    if prior.is_negative() {
        return Err(Error::Domain(format!("odds must be >= 0, got {prior}")));
    }
    let mut acc = prior.clone();
    for f in factors {
        if !f.is_positive() {
            return Err(Error::Domain(format!("factor must be > 0, got {f}")));
        }
        acc *= f;
    }
    Ok(acc)
}

/// Convenience for building exact rationals from small integers.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    assert!(denom != 0, "zero denominator");
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Nearest-`f64` value of a big rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odds_from_probability_examples() {
        assert_eq!(odds_from_probability(0.5).unwrap().ratio(), 1.0);
        assert!((odds_from_probability(5.0 / 7.0).unwrap().ratio() - 2.5).abs() < 1e-12);
        assert_eq!(odds_from_probability(0.0).unwrap().ratio(), 0.0);
        assert!(odds_from_probability(1.0).is_err());
        assert!(odds_from_probability(-0.1).is_err());
    }

    #[test]
    fn twelve_decibans_up_on_evens() {
        let prior = Odds::new(0.25).unwrap();
        let post = apply_factor(prior, 10f64.powf(1.81)).unwrap();
        assert!((post.ratio() - 0.25 * 10f64.powf(1.81)).abs() < 1e-9);
        assert!((post.ratio() - 16.2).abs() < 0.1);
    }

    #[test]
    fn vigenere_key_p_odds() {
        let prior = Odds::new(1.0 / 25.0).unwrap();
        let post = prior.apply_factor(10f64.powf(43.0 / 20.0)).unwrap();
        assert!((post.ratio() - 5.65).abs() < 0.01, "{}", post.ratio());
    }

    #[test]
    fn identity_factor() {
        let prior = Odds::new(3.7).unwrap();
        assert_eq!(apply_factor(prior, 1.0).unwrap(), prior);
        assert!(apply_factor(prior, -1.0).is_err());
    }

    #[test]
    fn died_in_bed_decibans() {
        let bed = decibans_from_factor(8.0 / 3.0).unwrap().value();
        assert!((bed - 4.26).abs() < 0.005);
        let father = decibans_from_factor((2.0 / 5.0) / (1.0 / 6.0))
            .unwrap()
            .value();
        assert!((father - 3.80).abs() < 0.005);
        assert_eq!(decibans_from_factor(1.0).unwrap().value(), 0.0);
        assert!(decibans_from_factor(0.0).is_err());
    }

    #[test]
    fn combine_examples() {
        let factors = [
            8.0 / 3.0,
            (2.0 / 5.0) / (1.0 / 6.0),
            (1.0 / 2.0) / (1.0 / 20.0),
        ];
        let post = combine_independent(&factors, Odds::new(0.25).unwrap()).unwrap();
        assert!((post.ratio() - 16.0).abs() < 0.5);

        let prior = Odds::from_pair(1.0, 4_999_999.0).unwrap();
        let post = combine_independent(&[676f64.powi(3)], prior).unwrap();
        assert!((post.ratio() - 61.8).abs() < 0.1);

        let post = combine_independent(&[2.0, 0.5], Odds::new(3.0).unwrap()).unwrap();
        assert!((post.ratio() - 3.0).abs() < 1e-12);

        let prior = Odds::new(0.3).unwrap();
        assert_eq!(combine_independent(&[], prior).unwrap(), prior);
    }

    #[test]
    fn exact_vg_rule() {
        let prior = exact_odds_from_probability(&ratio(1, 5_000_000)).unwrap();
        assert_eq!(prior, ratio(1, 4_999_999));
        let post = exact_combine(&prior, &[ratio(676 * 676 * 676, 1)]).unwrap();
        assert_eq!(post, ratio(308_915_776, 4_999_999));
        assert!((rational_to_f64(&post) - 61.783_17).abs() < 1e-4);
    }

    #[test]
    fn half_decibans_rounding() {
        assert_eq!(HalfDecibans::round(2.5).value(), 3);
        assert_eq!(HalfDecibans::round(-2.5).value(), -3);
        assert_eq!(HalfDecibans::from_factor(10.0).unwrap().value(), 20);
        assert_eq!(Decibans(5.57).to_half_decibans().value(), 11);
    }

    #[test]
    fn parse_odds() {
        assert_eq!("1:2".parse::<Odds>().unwrap().ratio(), 0.5);
        assert_eq!("5/2".parse::<Odds>().unwrap().ratio(), 2.5);
        assert_eq!("0.25".parse::<Odds>().unwrap().ratio(), 0.25);
        assert!("x".parse::<Odds>().is_err());
        assert!("1:0".parse::<Odds>().is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Odds::new(0.5).unwrap().to_string(), "2.00:1 against");
        assert_eq!(Odds::new(16.0).unwrap().to_string(), "16.00:1 on");
    }
}
