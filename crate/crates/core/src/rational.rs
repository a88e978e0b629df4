//! Exact rational numbers.
//!
//! Every probability, bid, payment and utility in the crate is a [`Rational`].
//! Values live in a 128-bit fraction while they fit and are promoted to an
//! arbitrary-precision fraction when an operation would overflow, so results
//! are always exact.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

type Small = Ratio<i128>;

#[derive(Clone, Debug)]
enum Repr {
    Small(Small),
    Big(BigRational),
}

/// An exact fraction.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn to_big(r: &Small) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Rational {
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Repr::Small(Small::new(numer, denom)))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Repr::Small(Small::from_integer(n)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn half() -> Self {
        Self::new(1, 2)
    }

    fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i128(), b.denom().to_i128()) {
            (Some(n), Some(d)) => Rational(Repr::Small(Small::new_raw(n, d))),
            _ => Rational(Repr::Big(b)),
        }
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(s) => to_big(s),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_zero(),
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_positive(),
            Repr::Big(b) => b.is_positive(),
        }
    }

    /// Numerator and denominator in lowest terms, if both fit in `i128`.
    pub fn to_i128_parts(&self) -> Option<(i128, i128)> {
        match &self.0 {
            Repr::Small(s) => Some((*s.numer(), *s.denom())),
            Repr::Big(b) => Some((b.numer().to_i128()?, b.denom().to_i128()?)),
        }
    }

    pub fn numer_denom(&self) -> (BigInt, BigInt) {
        let b = self.big();
        (b.numer().clone(), b.denom().clone())
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(s) => *s.numer() as f64 / *s.denom() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn square(&self) -> Rational {
        self * self
    }

    pub fn max_of<'a, I: IntoIterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.into_iter()
            .cloned()
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `true` when `0 <= self <= 1`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Rational::one()
    }

    /// Exact decimal rendering when the denominator has no prime factors
    /// other than 2 and 5, otherwise `p/q`.
    pub fn to_exact_string(&self) -> String {
        let (n, d) = self.numer_denom();
        let mut rest = d.clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut twos = 0u32;
        let mut fives = 0u32;
        while (&rest % &two).is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return format!("{n}/{d}");
        }
        let digits = twos.max(fives);
        if digits == 0 {
            return n.to_string();
        }
        // n/d = n * 10^digits / d / 10^digits, exact by construction.
        let scaled = &n * BigInt::from(10).pow(digits) / &d;
        let neg = scaled.is_negative();
        let mut s = scaled.abs().to_string();
        if s.len() <= digits as usize {
            s = "0".repeat(digits as usize - s.len() + 1) + &s;
        }
        let split = s.len() - digits as usize;
        let (int_part, frac_part) = s.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(int_part);
        if !frac_part.is_empty() {
            out.push('.');
            out.push_str(frac_part);
        }
        out
    }

    fn binop(
        &self,
        rhs: &Rational,
        small: impl Fn(&Small, &Small) -> Option<Small>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Rational {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(r) = small(a, b) {
                return Rational(Repr::Small(r));
            }
        }
        Rational::from_big(big(self.big(), rhs.big()))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            _ => self.big() == other.big(),
        }
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            // Cross multiplication in i128 may overflow; fall through when it does.
            if let (Some(l), Some(r)) = (
                i128::checked_mul(*a.numer(), *b.denom()),
                i128::checked_mul(*b.numer(), *a.denom()),
            ) {
                return l.cmp(&r);
            }
        }
        self.big().cmp(&other.big())
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Small and Big forms of the same value must hash alike; values that fit
        // are always stored Small, so hashing the canonical parts is enough.
        match &self.0 {
            Repr::Small(s) => {
                s.numer().hash(state);
                s.denom().hash(state);
            }
            Repr::Big(b) => {
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident, $bigop:tt) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                self.binop(rhs, |a, b| a.$checked(b), |a, b| a $bigop b)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add, +);
forward_binop!(Sub, sub, checked_sub, -);
forward_binop!(Mul, mul, checked_mul, *);

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        self.binop(rhs, |a, b| a.checked_div(b), |a, b| a / b)
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        (&self).div(&rhs)
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        (&self).div(rhs)
    }
}

impl<'a> Div<Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self.div(&rhs)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(s) => match s.numer().checked_neg() {
                Some(n) => Rational(Repr::Small(Small::new_raw(n, *s.denom()))),
                None => Rational::from_big(-to_big(s)),
            },
            Repr::Big(b) => Rational::from_big(-b.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -(&self)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = &*self * rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_exact_string())
    }
}

fn parse_integer(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::Malformed(whole.to_string()))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `3`, `-0.25`, `.5`, `1e-2`-free decimals and `p/q` fractions.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s = input.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let value = if let Some((p, q)) = body.split_once('/') {
            let p = parse_integer(p.trim(), s)?;
            let q = parse_integer(q.trim(), s)?;
            if q.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            BigRational::new(p, q)
        } else if let Some((int_part, frac_part)) = body.split_once('.') {
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(ParseRationalError::Malformed(s.to_string()));
            }
            let int = if int_part.is_empty() {
                BigInt::zero()
            } else {
                parse_integer(int_part, s)?
            };
            let frac = if frac_part.is_empty() {
                BigInt::zero()
            } else {
                parse_integer(frac_part, s)?
            };
            let scale = BigInt::from(10).pow(frac_part.len() as u32);
            BigRational::new(int * &scale + frac, scale)
        } else {
            BigRational::from_integer(parse_integer(body, s)?)
        };
        let value = Rational::from_big(value);
        Ok(if neg { -value } else { value })
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_exact_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used heavily in tests and fixtures: `q("0.3")`.
pub fn q(s: &str) -> Rational {
    s.parse()
        .unwrap_or_else(|e| panic!("invalid rational literal {s:?}: {e}"))
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(q("0.3"), Rational::new(3, 10));
        assert_eq!(q(".5"), Rational::new(1, 2));
        assert_eq!(q("1"), Rational::one());
        assert_eq!(q("-0.25"), Rational::new(-1, 4));
        assert_eq!(q("6/8"), Rational::new(3, 4));
        assert!("".parse::<Rational>().is_err());
        assert!("0.3.1".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1e3".parse::<Rational>().is_err());
    }

    #[test]
    fn renders_exactly() {
        assert_eq!(q("0.72").to_string(), "0.72");
        assert_eq!(q("0.2025").to_string(), "0.2025");
        assert_eq!(Rational::new(1, 3).to_string(), "1/3");
        assert_eq!(Rational::new(-1, 8).to_string(), "-0.125");
        assert_eq!(Rational::new(31, 32).to_string(), "0.96875");
        assert_eq!(Rational::from_integer(-4).to_string(), "-4");
        assert_eq!(Rational::new(1, 1000).to_string(), "0.001");
    }

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = Rational::new(i128::MAX / 3, 1);
        let sum = &big + &big + &big + &big;
        assert!(sum > big);
        let back = &sum - &big - &big - &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(_)));
        let tiny = Rational::new(1, i128::MAX / 7);
        let prod = &tiny * &tiny;
        assert!(prod.is_positive());
        assert_eq!(&prod / &tiny, tiny);
    }

    proptest! {
        #[test]
        fn exact_string_round_trips(n in -10_000i64..10_000, d in 1i64..5_000) {
            let r = Rational::new(n as i128, d as i128);
            let back: Rational = r.to_exact_string().parse().unwrap();
            prop_assert_eq!(back, r);
        }

        #[test]
        fn ordering_matches_floats(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = Rational::new(a as i128, b as i128);
            let y = Rational::new(c as i128, d as i128);
            let lhs = (a as i128) * (d as i128);
            let rhs = (c as i128) * (b as i128);
            prop_assert_eq!(x.cmp(&y), lhs.cmp(&rhs));
        }
    }
}
