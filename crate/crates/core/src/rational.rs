//! Exact rational scalars and their extension with `+∞`.
//!
//! Every probability, gain and leakage value in this crate is a [`Rational`].
//! Values are kept in canonical reduced form (positive denominator, coprime
//! numerator) by the underlying big-integer ratio, so equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::QifError;

/// An exact rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`, reducing to canonical form.
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self, QifError> {
        if denom.is_zero() {
            return Err(QifError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Exact division that reports a zero divisor instead of panicking.
    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, QifError> {
        if rhs.is_zero() {
            return Err(QifError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational, QifError> {
        Rational::one().checked_div(self)
    }

    /// Nearest `f64`; only ever used for display.
    pub fn to_f64(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            // Huge operands: scale both down by the same power of two.
            _ => {
                let shift = self
                    .denom()
                    .bits()
                    .max(self.numer().bits())
                    .saturating_sub(1000);
                let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
                let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
                n / d
            }
        }
    }

    /// Decimal rendering with `places` digits after the point.
    pub fn to_decimal(&self, places: usize) -> String {
        format!("{:.*}", places, self.to_f64())
    }

    pub fn max_of<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Option<Rational> {
        values.into_iter().max().cloned()
    }

    /// Parses the exchange grammar `-?[0-9]+(/[1-9][0-9]*)?` or
    /// `-?[0-9]+\.[0-9]+`. Decimals convert exactly (`0.75` is `3/4`).
    pub fn parse(text: &str) -> Result<Rational, QifError> {
        let bad = || QifError::BadRational(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());

        let value = if let Some((int, frac)) = body.split_once('.') {
            if !digits(int) || !digits(frac) {
                return Err(bad());
            }
            let numer: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            let denom = num_traits::pow(BigInt::from(10u8), frac.len());
            BigRational::new(numer, denom)
        } else if let Some((n, d)) = body.split_once('/') {
            if !digits(n) || !digits(d) || d.starts_with('0') {
                return Err(bad());
            }
            let numer: BigInt = n.parse().map_err(|_| bad())?;
            let denom: BigInt = d.parse().map_err(|_| bad())?;
            BigRational::new(numer, denom)
        } else {
            if !digits(body) {
                return Err(bad());
            }
            BigRational::from_integer(body.parse().map_err(|_| bad())?)
        };
        Ok(Rational(if negative { -value } else { value }))
    }

    /// Least common multiple of the denominators of `values`.
    pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
        values
            .into_iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
    }
}

impl FromStr for Rational {
    type Err = QifError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse(s)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Division panics on a zero divisor, like the integer types. Use
// `checked_div` where the divisor is data-dependent.
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
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

/// A rational extended with `+∞`.
///
/// `+∞` only comes out of capacity computations whose closed form divides
/// by a zero channel entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Rational),
    Infinite,
}

impl ExtRational {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }

    /// Natural logarithm as a float, for reports printing `ε` next to `e^ε`.
    pub fn ln(&self) -> f64 {
        match self {
            ExtRational::Finite(r) => r.to_f64().ln(),
            ExtRational::Infinite => f64::INFINITY,
        }
    }

    pub fn to_decimal(&self, places: usize) -> String {
        match self {
            ExtRational::Finite(r) => r.to_decimal(places),
            ExtRational::Infinite => "inf".to_string(),
        }
    }

    /// Parses a rational or the literals `inf` / `infinity`.
    pub fn parse(text: &str) -> Result<ExtRational, QifError> {
        match text {
            "inf" | "infinity" | "+inf" => Ok(ExtRational::Infinite),
            _ => Rational::parse(text).map(ExtRational::Finite),
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialEq<Rational> for ExtRational {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, ExtRational::Finite(r) if r == other)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinite) => Ordering::Less,
            (ExtRational::Infinite, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinite, ExtRational::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd<Rational> for ExtRational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(match self {
            ExtRational::Finite(r) => r.cmp(other),
            ExtRational::Infinite => Ordering::Greater,
        })
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => fmt::Display::fmt(r, f),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shorthand for `Rational::new` used throughout tests and examples.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let r = q(6, -8);
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!(r.denom(), &BigInt::from(4));
        assert_eq!(q(10, 5).to_string(), "2");
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(Rational::parse("0.75").unwrap(), q(3, 4));
        assert_eq!(Rational::parse("0.6").unwrap(), q(3, 5));
        assert_eq!(Rational::parse("-1.250").unwrap(), q(-5, 4));
        assert_eq!(Rational::parse("19/20").unwrap(), q(19, 20));
        assert_eq!(Rational::parse("-2/4").unwrap(), q(-1, 2));
        assert_eq!(Rational::parse("7").unwrap(), q(7, 1));
    }

    #[test]
    fn malformed_rationals_rejected() {
        for bad in [
            "", "1/0", "1/05", ".5", "5.", "1/2/3", "a", "+1", "1 /2", "--1", "1e3", "0x1",
        ] {
            assert!(Rational::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn checked_division() {
        assert!(q(1, 2).checked_div(&Rational::zero()).is_err());
        assert_eq!(q(1, 2).checked_div(&q(1, 4)).unwrap(), q(2, 1));
    }

    #[test]
    fn infinity_dominates() {
        let inf = ExtRational::Infinite;
        assert!(inf > ExtRational::Finite(q(1_000_000, 1)));
        assert!(inf > q(3, 1));
        assert!(ExtRational::Finite(q(4, 1)) < inf);
        assert_eq!(ExtRational::parse("inf").unwrap(), inf);
        assert_eq!(inf.ln(), f64::INFINITY);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q(19, 11).to_decimal(4), "1.7273");
        assert_eq!(ExtRational::Finite(q(4, 1)).ln(), 4f64.ln());
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = q(n, d);
            prop_assert_eq!(Rational::parse(&r.to_string()).unwrap(), r);
        }

        #[test]
        fn decimal_parse_is_exact(int in 0u32..1000, frac in 0u32..100_000, places in 1usize..6) {
            let frac = frac % 10u32.pow(places as u32);
            let text = format!("{int}.{frac:0places$}");
            let expected = q(int as i64 * 10i64.pow(places as u32) + frac as i64, 10i64.pow(places as u32));
            prop_assert_eq!(Rational::parse(&text).unwrap(), expected);
        }
    }
}
