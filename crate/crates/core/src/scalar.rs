//! Scalar abstractions shared by the interval algebra and the construction.
//!
//! The interval algebra only needs an ordered ring with exact comparisons, so
//! it is written against [`Scalar`]. Window extraction additionally needs an
//! exact floor and an embedding of the rationals, which [`ExactField`] adds.
//! Both [`Rational`] and [`QuadraticNumber`] implement the latter; `f64`
//! implements [`Scalar`] only and is meant for plotting output.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::quadratic::QuadraticNumber;

/// Exact arbitrary-precision fraction, always in lowest terms.
pub type Rational = BigRational;

/// Ordered ring element usable as an interval endpoint.
pub trait Scalar: Clone + PartialOrd + Num + Debug {}

impl<T: Clone + PartialOrd + Num + Debug> Scalar for T {}

/// Ordered field containing the rationals, with an exact floor.
pub trait ExactField: Scalar + Neg<Output = Self> {
    fn from_rational(q: &Rational) -> Self;

    /// Embeds a quadratic number, or `None` when it lies outside this field.
    fn from_quadratic(x: &QuadraticNumber) -> Option<Self>;

    fn floor_int(&self) -> BigInt;

    fn ceil_int(&self) -> BigInt {
        -(-self.clone()).floor_int()
    }
}

impl ExactField for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_quadratic(x: &QuadraticNumber) -> Option<Self> {
        x.to_rational()
    }

    fn floor_int(&self) -> BigInt {
        self.floor().to_integer()
    }
}

impl ExactField for QuadraticNumber {
    fn from_rational(q: &Rational) -> Self {
        QuadraticNumber::from_rational(q.clone())
    }

    fn from_quadratic(x: &QuadraticNumber) -> Option<Self> {
        Some(x.clone())
    }

    fn floor_int(&self) -> BigInt {
        self.floor()
    }
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses an exact rational written as `p` or `p/q`.
///
/// Decimal notation is rejected so that inputs never pass through a binary
/// approximation.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "decimal input {s:?} is not accepted; write it as p/q"
        )));
    }
    let (numer, denom) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    let denom: BigInt = denom
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// `⌈a/b⌉` for `b > 0`.
pub fn ceil_div(a: &Rational, b: &Rational) -> BigInt {
    assert!(b.is_positive(), "ceil_div needs a positive divisor");
    (a / b).ceil().to_integer()
}

/// Fractional part `q - ⌊q⌋`, always in `[0, 1)`.
pub fn frac_rational(q: &Rational) -> Rational {
    q - q.floor()
}

pub(crate) fn abs_max(lo: &Rational, hi: &Rational) -> Rational {
    let (a, b) = (lo.abs(), hi.abs());
    if a > b {
        a
    } else {
        b
    }
}

/// `2^-bits` as a rational.
pub(crate) fn pow2_neg(bits: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_rational("7/3").unwrap(), rational(7, 3));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), rational(-2, 3));
        assert_eq!(parse_rational("12").unwrap(), rational(12, 1));
    }

    #[test]
    fn rejects_decimal_and_zero_denominator() {
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn ceil_div_examples() {
        assert_eq!(ceil_div(&rational(9, 2), &rational(1, 1)), BigInt::from(5));
        assert_eq!(ceil_div(&rational(0, 1), &rational(7, 3)), BigInt::from(0));
        assert_eq!(ceil_div(&rational(-1, 2), &rational(1, 1)), BigInt::from(0));
    }

    #[test]
    fn ceil_div_matches_term_count() {
        // Terms 1/2 + n lying in [0, 5).
        let count = (0..100)
            .map(|n| rational(1, 2) + integer(n))
            .filter(|t| *t < integer(5))
            .count();
        assert_eq!(
            BigInt::from(count),
            ceil_div(&(integer(5) - rational(1, 2)), &integer(1))
        );
    }

    #[test]
    fn fractional_part_uses_mathematical_floor() {
        assert_eq!(frac_rational(&rational(7, 3)), rational(1, 3));
        assert_eq!(frac_rational(&rational(-1, 2)), rational(1, 2));
        assert_eq!(rational(-1, 2).floor_int(), BigInt::from(-1));
    }
}
