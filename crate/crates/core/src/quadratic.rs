//! Exact arithmetic in real quadratic fields `Q(√d)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational};

/// Trial division bound used when extracting square factors from a radicand.
const SQUAREFREE_TRIAL_LIMIT: u64 = 1_000_000;

/// A number `a + b√d` with rational `a`, `b` and squarefree `d > 1`.
///
/// Rational values are stored with `b = 0` and `d = 0`, so a rational embeds
/// into every quadratic field. Combining two irrational values with different
/// radicands panics; [`QuadraticNumber::checked_add`] and friends return `None`
/// instead.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    rational: Rational,
    coeff: Rational,
    radicand: BigInt,
}

fn squarefree_split(d: &BigInt) -> (BigInt, BigInt) {
    let mut rest = d.clone();
    let mut square_root = BigInt::one();
    let mut p = BigInt::from(2u32);
    let mut steps = 0u64;
    while &p * &p <= rest && steps < SQUAREFREE_TRIAL_LIMIT {
        let p2 = &p * &p;
        while (&rest % &p2).is_zero() {
            rest /= &p2;
            square_root *= &p;
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
        steps += 1;
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        square_root *= &r;
        rest = BigInt::one();
    }
    (square_root, rest)
}

impl QuadraticNumber {
    /// Builds `a + b√d`. Square factors of `d` are pulled into `b`; a perfect
    /// square `d` gives a rational result.
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Result<Self> {
        if d.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "radicand {d} must be nonnegative"
            )));
        }
        if d.is_zero() || b.is_zero() {
            return Ok(Self::from_rational(a));
        }
        let (root, rest) = squarefree_split(&d);
        let b = b * Rational::from_integer(root);
        if rest.is_one() {
            return Ok(Self::from_rational(a + b));
        }
        Ok(Self {
            rational: a,
            coeff: b,
            radicand: rest,
        })
    }

    pub fn from_rational(a: Rational) -> Self {
        Self {
            rational: a,
            coeff: Rational::zero(),
            radicand: BigInt::zero(),
        }
    }

    /// `√d` for a nonnegative integer `d`.
    pub fn sqrt(d: impl Into<BigInt>) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), d.into())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn irrational_coeff(&self) -> &Rational {
        &self.coeff
    }

    /// The squarefree radicand, or `None` for a rational value.
    pub fn radicand(&self) -> Option<&BigInt> {
        (!self.coeff.is_zero()).then_some(&self.radicand)
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rational.clone())
    }

    /// Whether both values live in a common field.
    pub fn same_field(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    fn field_with(&self, other: &Self) -> Option<BigInt> {
        match (self.radicand(), other.radicand()) {
            (None, None) => Some(BigInt::zero()),
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(d), Some(e)) => (d == e).then(|| d.clone()),
        }
    }

    fn build(rational: Rational, coeff: Rational, radicand: BigInt) -> Self {
        if coeff.is_zero() {
            Self::from_rational(rational)
        } else {
            Self {
                rational,
                coeff,
                radicand,
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let d = self.field_with(other)?;
        Some(Self::build(
            &self.rational + &other.rational,
            &self.coeff + &other.coeff,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&-other.clone())
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let d = self.field_with(other)?;
        let dq = Rational::from_integer(d.clone());
        let rational = &self.rational * &other.rational + &self.coeff * &other.coeff * dq;
        let coeff = &self.rational * &other.coeff + &other.rational * &self.coeff;
        Some(Self::build(rational, coeff, d))
    }

    /// `a² - b²d`, the field norm. Nonzero for every nonzero value.
    pub fn norm(&self) -> Rational {
        let d = Rational::from_integer(self.radicand.clone());
        &self.rational * &self.rational - &self.coeff * &self.coeff * d
    }

    pub fn conjugate(&self) -> Self {
        Self::build(
            self.rational.clone(),
            -self.coeff.clone(),
            self.radicand.clone(),
        )
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn checked_recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self.norm();
        let conj = self.conjugate();
        Some(Self::build(
            conj.rational / &norm,
            conj.coeff / &norm,
            self.radicand.clone(),
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        self.checked_mul(&other.checked_recip()?)
    }

    /// Exact sign, decided by comparing `a²` with `b²d` when the parts disagree.
    pub fn signum_ordering(&self) -> Ordering {
        let sa = self.rational.cmp(&Rational::zero());
        let sb = self.coeff.cmp(&Rational::zero());
        match (sa, sb) {
            (_, Ordering::Equal) => sa,
            (Ordering::Equal, _) => sb,
            _ if sa == sb => sa,
            _ => {
                let a2 = &self.rational * &self.rational;
                let b2d = &self.coeff * &self.coeff * Rational::from_integer(self.radicand.clone());
                if a2 > b2d {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    /// Exact floor, using one integer square root.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        // x = (A + s√d) / Q with Q > 0; √(s²d) lies strictly between r and r + 1.
        let (p1, q1) = (self.rational.numer(), self.rational.denom());
        let (p2, q2) = (self.coeff.numer(), self.coeff.denom());
        let big_a = p1 * q2;
        let s = p2 * q1;
        let q = q1 * q2;
        let r = (&s * &s * &self.radicand).sqrt();
        let c = if s.is_positive() {
            big_a + r
        } else {
            big_a - r - 1
        };
        c.div_floor(&q)
    }

    /// A rational enclosure `[lo, hi]` with `hi - lo <= width`.
    pub fn enclosure(&self, width: &Rational) -> (Rational, Rational) {
        assert!(width.is_positive(), "enclosure width must be positive");
        if self.is_rational() {
            return (self.rational.clone(), self.rational.clone());
        }
        let bits = (self.coeff.abs() / width).ceil().to_integer().bits();
        let scale = BigInt::one() << (2 * bits);
        let root = (&self.radicand * scale).sqrt();
        let denom = BigInt::one() << bits;
        let lo_root = Rational::new(root.clone(), denom.clone());
        let hi_root = Rational::new(root + 1, denom);
        let (lo, hi) = if self.coeff.is_positive() {
            (&self.coeff * lo_root, &self.coeff * hi_root)
        } else {
            (&self.coeff * hi_root, &self.coeff * lo_root)
        };
        (&self.rational + lo, &self.rational + hi)
    }

    /// Closest `f64`, for display and plotting only.
    pub fn to_f64_approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        let (lo, hi) = self.enclosure(&Rational::new(BigInt::one(), BigInt::one() << 64u32));
        ((lo + hi) / Rational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical exact form: `a`, `b*sqrt(d)` or `a+b*sqrt(d)`.
impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rational);
        }
        let magnitude = self.coeff.abs();
        let surd = if magnitude.is_one() {
            format!("sqrt({})", self.radicand)
        } else {
            format!("{}*sqrt({})", magnitude, self.radicand)
        };
        let sign = if self.coeff.is_negative() { "-" } else { "+" };
        if self.rational.is_zero() {
            if self.coeff.is_negative() {
                write!(f, "-{surd}")
            } else {
                write!(f, "{surd}")
            }
        } else {
            write!(f, "{}{sign}{surd}", self.rational)
        }
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum_ordering()
    }
}

impl Neg for QuadraticNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self::build(-self.rational, -self.coeff, self.radicand)
    }
}

fn mixed(a: &QuadraticNumber, b: &QuadraticNumber) -> ! {
    panic!("cannot combine {a} and {b}: different quadratic fields")
}

impl Add for QuadraticNumber {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).unwrap_or_else(|| mixed(&self, &rhs))
    }
}

impl Sub for QuadraticNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).unwrap_or_else(|| mixed(&self, &rhs))
    }
}

impl Mul for QuadraticNumber {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).unwrap_or_else(|| mixed(&self, &rhs))
    }
}

impl Div for QuadraticNumber {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            panic!("division by zero");
        }
        self.checked_div(&rhs).unwrap_or_else(|| mixed(&self, &rhs))
    }
}

/// Remainder of truncated division, as for the primitive integer types.
impl Rem for QuadraticNumber {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = self.clone() / rhs.clone();
        let trunc = if q.signum_ordering() == Ordering::Less {
            -(-q).floor()
        } else {
            q.floor()
        };
        self - rhs * Self::from_rational(Rational::from_integer(trunc))
    }
}

impl Zero for QuadraticNumber {
    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeff.is_zero()
    }
}

impl One for QuadraticNumber {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl Num for QuadraticNumber {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::Parse(format!("unsupported radix {radix}")));
        }
        s.parse()
    }
}

impl From<Rational> for QuadraticNumber {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

/// Parses expressions over rationals and square roots, such as `sqrt(2)`,
/// `1/2+3*sqrt(5)` or `(1+sqrt(5))/2`. All radicals must share one field.
impl FromStr for QuadraticNumber {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = ExprParser {
            src: s.as_bytes(),
            pos: 0,
            text: s,
        };
        let value = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl ExprParser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.text))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn combine(&self, a: QuadraticNumber, b: QuadraticNumber, op: u8) -> Result<QuadraticNumber> {
        let out = match op {
            b'+' => a.checked_add(&b),
            b'-' => a.checked_sub(&b),
            b'*' => a.checked_mul(&b),
            _ => {
                if b.is_zero() {
                    return Err(self.error("division by zero"));
                }
                a.checked_div(&b)
            }
        };
        out.ok_or_else(|| self.error("radicals from different quadratic fields"))
    }

    fn expr(&mut self) -> Result<QuadraticNumber> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = self.combine(acc, rhs, op)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<QuadraticNumber> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = self.combine(acc, rhs, op)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<QuadraticNumber> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<QuadraticNumber> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
                    return Err(Error::Parse(format!(
                        "decimal input {:?} is not accepted; write it as p/q",
                        self.text
                    )));
                }
                let digits = &self.text[start..self.pos];
                Ok(QuadraticNumber::from_rational(parse_rational(digits)?))
            }
            Some(b's') if self.src[self.pos..].starts_with(b"sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                let arg = arg
                    .to_rational()
                    .ok_or_else(|| self.error("nested radicals are not supported"))?;
                if arg.is_negative() {
                    return Err(self.error("square root of a negative number"));
                }
                // √(p/q) = √(pq)/q
                let radicand = arg.numer() * arg.denom();
                let coeff = Rational::new(BigInt::one(), arg.denom().clone());
                QuadraticNumber::new(Rational::zero(), coeff, radicand)
            }
            _ => Err(self.error("expected a number, `sqrt(` or `(`")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }
}
