//! Certified reals: values accessed through rational enclosures, decided
//! exactly whenever the value is rational or a quadratic irrational.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadratic::QuadraticNumber;
use crate::scalar::{abs_max, pow2_neg, Rational};

/// Default refinement limit for opaque enclosures: width `2^-256`.
pub const DEFAULT_REFINE_BITS: u64 = 256;

/// Returns an enclosure `[lo, hi]` of the value with `hi - lo <= width`.
pub type Oracle = Arc<dyn Fn(&Rational) -> (Rational, Rational) + Send + Sync>;

/// Opaque refinable value together with the narrowest width it may be asked
/// for before a decision is reported as undecidable.
#[derive(Clone)]
pub struct Enclosure {
    oracle: Oracle,
    limit: Rational,
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enclosure")
            .field("limit", &self.limit)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum RealKind {
    Rational(Rational),
    Quadratic(QuadraticNumber),
    Enclosure(Enclosure),
}

/// A real number with a current rational enclosure `[lo, hi]`.
///
/// Values are immutable; [`CertifiedReal::refine`] returns a new value.
#[derive(Clone, Debug)]
pub struct CertifiedReal {
    kind: RealKind,
    lo: Rational,
    hi: Rational,
}

fn default_limit() -> Rational {
    pow2_neg(DEFAULT_REFINE_BITS)
}

fn merge_limits(a: Option<&Rational>, b: Option<&Rational>) -> Rational {
    match (a, b) {
        (Some(x), Some(y)) => x.min(y).clone(),
        (Some(x), None) | (None, Some(x)) => x.clone(),
        (None, None) => default_limit(),
    }
}

impl CertifiedReal {
    pub fn from_rational(q: Rational) -> Self {
        Self {
            lo: q.clone(),
            hi: q.clone(),
            kind: RealKind::Rational(q),
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    /// Wraps a quadratic number; rational values get the rational kind.
    pub fn from_quadratic(x: QuadraticNumber) -> Self {
        match x.to_rational() {
            Some(q) => Self::from_rational(q),
            None => {
                let (lo, hi) = x.enclosure(&Rational::one());
                Self {
                    kind: RealKind::Quadratic(x),
                    lo,
                    hi,
                }
            }
        }
    }

    /// `√d` for a nonnegative integer `d`.
    pub fn sqrt(d: impl Into<BigInt>) -> Result<Self> {
        Ok(Self::from_quadratic(QuadraticNumber::sqrt(d)?))
    }

    /// Wraps an opaque value given by its enclosure oracle, with the default
    /// refinement limit.
    pub fn from_oracle(oracle: Oracle) -> Result<Self> {
        Self::from_enclosure(Enclosure {
            oracle,
            limit: default_limit(),
        })
    }

    fn from_enclosure(enclosure: Enclosure) -> Result<Self> {
        let one = Rational::one();
        let (lo, hi) = checked_call(&enclosure.oracle, &one)?;
        Ok(Self {
            kind: RealKind::Enclosure(enclosure),
            lo,
            hi,
        })
    }

    /// Sets the narrowest enclosure width used when deciding comparisons.
    /// Has no effect on exact kinds.
    pub fn with_refine_limit(mut self, limit: Rational) -> Self {
        assert!(limit.is_positive(), "refinement limit must be positive");
        if let RealKind::Enclosure(e) = &mut self.kind {
            e.limit = limit;
        }
        self
    }

    pub fn kind(&self) -> &RealKind {
        &self.kind
    }

    pub fn enclosure(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Exact value for the rational and quadratic kinds.
    pub fn exact(&self) -> Option<QuadraticNumber> {
        match &self.kind {
            RealKind::Rational(q) => Some(QuadraticNumber::from_rational(q.clone())),
            RealKind::Quadratic(x) => Some(x.clone()),
            RealKind::Enclosure(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.kind {
            RealKind::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// `Some(true)` for rationals, `Some(false)` for quadratic irrationals and
    /// `None` when the kind gives no exact answer.
    pub fn is_rational(&self) -> Option<bool> {
        match &self.kind {
            RealKind::Rational(_) => Some(true),
            RealKind::Quadratic(_) => Some(false),
            RealKind::Enclosure(_) => None,
        }
    }

    fn limit(&self) -> Option<&Rational> {
        match &self.kind {
            RealKind::Enclosure(e) => Some(&e.limit),
            _ => None,
        }
    }

    /// Oracle view of any kind.
    pub fn oracle(&self) -> Oracle {
        match &self.kind {
            RealKind::Rational(q) => {
                let q = q.clone();
                Arc::new(move |_| (q.clone(), q.clone()))
            }
            RealKind::Quadratic(x) => {
                let x = x.clone();
                Arc::new(move |w| x.enclosure(w))
            }
            RealKind::Enclosure(e) => e.oracle.clone(),
        }
    }

    /// New value whose current enclosure has width at most `width`.
    pub fn refine(&self, width: &Rational) -> Result<Self> {
        if !width.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "refinement width {width} must be positive"
            )));
        }
        let (lo, hi) = match &self.kind {
            RealKind::Rational(_) => return Ok(self.clone()),
            RealKind::Quadratic(x) => x.enclosure(width),
            RealKind::Enclosure(e) => {
                let (lo, hi) = checked_call(&e.oracle, width)?;
                (lo.max(self.lo.clone()), hi.min(self.hi.clone()))
            }
        };
        if &hi - &lo > *width {
            return Err(Error::BadEnclosure {
                lo: Box::new(lo),
                hi: Box::new(hi),
                requested: Box::new(width.clone()),
            });
        }
        Ok(Self {
            kind: self.kind.clone(),
            lo,
            hi,
        })
    }

    /// Runs `decide` on successively narrower enclosures until it answers or
    /// the refinement limit is reached. Only used for the enclosure kind.
    fn decide_by_refinement<T>(
        &self,
        mut decide: impl FnMut(&Rational, &Rational) -> Option<T>,
    ) -> std::result::Result<T, Rational> {
        if let Some(answer) = decide(&self.lo, &self.hi) {
            return Ok(answer);
        }
        let limit = self.limit().cloned().unwrap_or_else(default_limit);
        let mut bits = 8u64;
        loop {
            let width = pow2_neg(bits).max(limit.clone());
            let refined = match self.refine(&width) {
                Ok(r) => r,
                Err(_) => return Err(width),
            };
            if let Some(answer) = decide(&refined.lo, &refined.hi) {
                return Ok(answer);
            }
            if width <= limit {
                return Err(width);
            }
            bits *= 2;
        }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, c: &Rational) -> Result<Ordering> {
        match &self.kind {
            RealKind::Rational(q) => Ok(q.cmp(c)),
            RealKind::Quadratic(x) => Ok(x
                .checked_sub(&QuadraticNumber::from_rational(c.clone()))
                .expect("rational embeds in every field")
                .signum_ordering()),
            RealKind::Enclosure(_) => self
                .decide_by_refinement(|lo, hi| {
                    if hi < c {
                        Some(Ordering::Less)
                    } else if lo > c {
                        Some(Ordering::Greater)
                    } else if lo == hi {
                        Some(Ordering::Equal)
                    } else {
                        None
                    }
                })
                .map_err(|width| Error::UndecidableBoundary { width }),
        }
    }

    pub fn signum(&self) -> Result<Ordering> {
        self.cmp_rational(&Rational::zero())
    }

    pub fn floor(&self) -> Result<BigInt> {
        match &self.kind {
            RealKind::Rational(q) => Ok(q.floor().to_integer()),
            RealKind::Quadratic(x) => Ok(x.floor()),
            RealKind::Enclosure(_) => self
                .decide_by_refinement(|lo, hi| {
                    let f = lo.floor();
                    (f == hi.floor()).then(|| f.to_integer())
                })
                .map_err(|width| Error::UndecidableFloor { width }),
        }
    }

    /// Fractional part `x - ⌊x⌋ ∈ [0, 1)` with enclosure width at most
    /// `precision`.
    pub fn frac(&self, precision: &Rational) -> Result<Self> {
        let floor = Self::from_integer(self.floor()?);
        self.sub(&floor).refine(precision)
    }

    /// Index `i` of the subinterval `[i/N, (i+1)/N)` containing `⟨x⟩`.
    ///
    /// Computed as `⌊Nx⌋ - N⌊x⌋`, which needs no approximation of `⟨x⟩`.
    pub fn locate_subinterval(&self, n: u64) -> Result<u64> {
        assert!(n >= 1, "number of subintervals must be positive");
        let nn = BigInt::from(n);
        let index = match &self.kind {
            RealKind::Rational(q) => {
                let scaled = q * Rational::from_integer(nn.clone());
                scaled.floor().to_integer() - &nn * q.floor().to_integer()
            }
            RealKind::Quadratic(x) => {
                let scaled = x
                    .checked_mul(&QuadraticNumber::from_rational(Rational::from_integer(
                        nn.clone(),
                    )))
                    .expect("rational embeds in every field");
                scaled.floor() - &nn * x.floor()
            }
            RealKind::Enclosure(_) => {
                let nq = Rational::from_integer(nn.clone());
                self.decide_by_refinement(|lo, hi| {
                    let (f_lo, f_hi) = (lo.floor(), hi.floor());
                    let (g_lo, g_hi) = ((lo * &nq).floor(), (hi * &nq).floor());
                    (f_lo == f_hi && g_lo == g_hi).then(|| (g_lo - f_lo * &nq).to_integer())
                })
                .map_err(|width| Error::UndecidableBoundary { width })?
            }
        };
        Ok(u64::try_from(&index).expect("subinterval index lies in 0..N"))
    }

    fn exact_pair(&self, other: &Self) -> Option<(QuadraticNumber, QuadraticNumber)> {
        let (a, b) = (self.exact()?, other.exact()?);
        a.same_field(&b).then_some((a, b))
    }

    fn derived(&self, other: &Self, oracle: Oracle) -> Self {
        let enclosure = Enclosure {
            oracle,
            limit: merge_limits(self.limit(), other.limit()),
        };
        Self::from_enclosure(enclosure).expect("derived oracles honour the width contract")
    }

    pub fn add(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.exact_pair(other) {
            return Self::from_quadratic(a.checked_add(&b).expect("same field"));
        }
        let (f, g) = (self.oracle(), other.oracle());
        let two = Rational::from_integer(BigInt::from(2));
        self.derived(
            other,
            Arc::new(move |w| {
                let half = w / &two;
                let (a_lo, a_hi) = f(&half);
                let (b_lo, b_hi) = g(&half);
                (a_lo + b_lo, a_hi + b_hi)
            }),
        )
    }

    pub fn neg(&self) -> Self {
        match &self.kind {
            RealKind::Rational(q) => Self::from_rational(-q.clone()),
            RealKind::Quadratic(x) => Self::from_quadratic(-x.clone()),
            RealKind::Enclosure(e) => {
                let f = e.oracle.clone();
                Self {
                    kind: RealKind::Enclosure(Enclosure {
                        oracle: Arc::new(move |w| {
                            let (lo, hi) = f(w);
                            (-hi, -lo)
                        }),
                        limit: e.limit.clone(),
                    }),
                    lo: -self.hi.clone(),
                    hi: -self.lo.clone(),
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.exact_pair(other) {
            return Self::from_quadratic(a.checked_mul(&b).expect("same field"));
        }
        let (f, g) = (self.oracle(), other.oracle());
        // Operand enclosures of width w' <= 1 have endpoints bounded by M + 1,
        // so the product enclosure has width at most (M1 + M2 + 3) w'.
        let bound = abs_max(&self.lo, &self.hi)
            + abs_max(&other.lo, &other.hi)
            + Rational::from_integer(BigInt::from(3));
        self.derived(
            other,
            Arc::new(move |w| {
                let inner = (w / &bound).min(Rational::one());
                let (a_lo, a_hi) = f(&inner);
                let (b_lo, b_hi) = g(&inner);
                let products = [&a_lo * &b_lo, &a_lo * &b_hi, &a_hi * &b_lo, &a_hi * &b_hi];
                let lo = products.iter().min().expect("nonempty").clone();
                let hi = products.iter().max().expect("nonempty").clone();
                (lo, hi)
            }),
        )
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&Self::from_rational(q.clone()))
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        self.add(&Self::from_rational(q.clone()))
    }

    pub fn recip(&self) -> Result<Self> {
        match &self.kind {
            RealKind::Rational(q) => {
                if q.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Self::from_rational(q.recip()))
                }
            }
            RealKind::Quadratic(x) => Ok(Self::from_quadratic(
                x.checked_recip().ok_or(Error::DivisionByZero)?,
            )),
            RealKind::Enclosure(_) => {
                let zero = Rational::zero();
                // Lower bound on |x| from an enclosure that excludes zero.
                let gap = self
                    .decide_by_refinement(|lo, hi| {
                        if lo > &zero || hi < &zero {
                            Some(lo.abs().min(hi.abs()))
                        } else {
                            None
                        }
                    })
                    .map_err(|width| Error::UndecidableBoundary { width })?;
                let f = self.oracle();
                let two = Rational::from_integer(BigInt::from(2));
                let four = Rational::from_integer(BigInt::from(4));
                let inner_cap = &gap / &two;
                let gap_sq = &gap * &gap;
                let enclosure = Enclosure {
                    oracle: Arc::new(move |w| {
                        let inner = (w * &gap_sq / &four).min(inner_cap.clone());
                        let (lo, hi) = f(&inner);
                        (hi.recip(), lo.recip())
                    }),
                    limit: self.limit().cloned().unwrap_or_else(default_limit),
                };
                Self::from_enclosure(enclosure)
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if let Some((a, b)) = self.exact_pair(other) {
            return Ok(Self::from_quadratic(
                a.checked_div(&b).ok_or(Error::DivisionByZero)?,
            ));
        }
        Ok(self.mul(&other.recip()?))
    }

    /// Exact equality for exact kinds; `None` when either side is opaque.
    pub fn exact_eq(&self, other: &Self) -> Option<bool> {
        let (a, b) = (self.exact()?, other.exact()?);
        Some(a == b)
    }

    pub fn to_f64_approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        match &self.kind {
            RealKind::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            RealKind::Quadratic(x) => x.to_f64_approx(),
            RealKind::Enclosure(_) => ((&self.lo + &self.hi) / Rational::from_integer(2.into()))
                .to_f64()
                .unwrap_or(f64::NAN),
        }
    }
}

fn checked_call(oracle: &Oracle, width: &Rational) -> Result<(Rational, Rational)> {
    let (lo, hi) = oracle(width);
    if lo > hi || &hi - &lo > *width {
        return Err(Error::BadEnclosure {
            lo: Box::new(lo),
            hi: Box::new(hi),
            requested: Box::new(width.clone()),
        });
    }
    Ok((lo, hi))
}

impl From<Rational> for CertifiedReal {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl From<QuadraticNumber> for CertifiedReal {
    fn from(x: QuadraticNumber) -> Self {
        Self::from_quadratic(x)
    }
}

/// Exact kinds print in canonical form (`p/q` or `a+b*sqrt(d)`); opaque
/// values print their current enclosure, which does not parse back.
impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RealKind::Rational(q) => write!(f, "{q}"),
            RealKind::Quadratic(x) => write!(f, "{x}"),
            RealKind::Enclosure(_) => write!(f, "enclosure[{},{}]", self.lo, self.hi),
        }
    }
}

impl FromStr for CertifiedReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::from_quadratic(s.parse()?))
    }
}

impl Serialize for CertifiedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CertifiedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, rational};

    fn real(s: &str) -> CertifiedReal {
        s.parse().unwrap()
    }

    /// Opaque wrapper around an exact value, so that the enclosure code path
    /// is exercised on values with known answers.
    fn opaque(s: &str) -> CertifiedReal {
        let x: QuadraticNumber = s.parse().unwrap();
        CertifiedReal::from_oracle(Arc::new(move |w| x.enclosure(w))).unwrap()
    }

    #[test]
    fn frac_examples() {
        let f = real("7/3").frac(&rational(1, 10)).unwrap();
        assert_eq!(f.as_rational(), Some(&rational(1, 3)));
        let f = real("-1/2").frac(&rational(1, 10)).unwrap();
        assert_eq!(f.as_rational(), Some(&rational(1, 2)));
    }

    #[test]
    fn frac_of_sqrt2_matches_integer_square_root() {
        let precision = rational(1, 1_000_000);
        let f = real("sqrt(2)").frac(&precision).unwrap();
        let (lo, hi) = f.enclosure();
        assert!(hi - lo <= precision);
        // Independent: ⌊√2·10^12⌋ = isqrt(2·10^24).
        let scale = BigInt::from(10u64).pow(12);
        let digits = num_integer::Roots::sqrt(&(BigInt::from(2) * &scale * &scale));
        let reference = Rational::new(digits, scale) - integer(1);
        let eps = rational(1, 1_000_000_000_000);
        assert!(lo <= &(&reference + &eps) && hi >= &reference);
        assert!(*lo > rational(414_213, 1_000_000) && *hi < rational(414_215, 1_000_000));
    }

    #[test]
    fn locate_subinterval_examples() {
        assert_eq!(real("1/2").locate_subinterval(3).unwrap(), 1);
        assert_eq!(real("sqrt(2)").locate_subinterval(3).unwrap(), 1);
        assert_eq!(real("2/3").locate_subinterval(3).unwrap(), 2);
        assert_eq!(real("-1/2").locate_subinterval(3).unwrap(), 1);
        assert_eq!(real("-1/3").locate_subinterval(3).unwrap(), 2);
    }

    #[test]
    fn enclosure_kind_decides_away_from_boundaries() {
        let x = opaque("sqrt(2)");
        assert_eq!(x.floor().unwrap(), BigInt::from(1));
        assert_eq!(x.locate_subinterval(3).unwrap(), 1);
        assert_eq!(x.cmp_rational(&rational(3, 2)).unwrap(), Ordering::Less);
        let y = x.mul(&real("sqrt(3)"));
        assert_eq!(y.floor().unwrap(), BigInt::from(2)); // √6 ≈ 2.449
        assert_eq!(y.locate_subinterval(2).unwrap(), 0);
    }

    #[test]
    fn enclosure_kind_reports_undecidable_at_boundary() {
        let two = CertifiedReal::from_oracle(Arc::new(|w: &Rational| {
            (integer(2) - w / integer(2), integer(2) + w / integer(2))
        }))
        .unwrap()
        .with_refine_limit(pow2_neg(64));
        assert!(matches!(two.floor(), Err(Error::UndecidableFloor { .. })));
        assert!(matches!(
            two.locate_subinterval(3),
            Err(Error::UndecidableBoundary { .. })
        ));
        assert!(matches!(
            two.cmp_rational(&integer(2)),
            Err(Error::UndecidableBoundary { .. })
        ));
    }

    #[test]
    fn mixed_fields_fall_back_to_enclosures() {
        let s = real("sqrt(2)").add(&real("sqrt(3)"));
        assert_eq!(s.is_rational(), None);
        // √2 + √3 ≈ 3.146
        assert_eq!(s.floor().unwrap(), BigInt::from(3));
        assert_eq!(
            s.cmp_rational(&rational(3146, 1000)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            s.cmp_rational(&rational(3147, 1000)).unwrap(),
            Ordering::Less
        );
        let q = real("sqrt(2)").div(&opaque("sqrt(3)")).unwrap();
        // √(2/3) ≈ 0.8165
        assert_eq!(
            q.cmp_rational(&rational(8164, 10000)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            q.cmp_rational(&rational(8166, 10000)).unwrap(),
            Ordering::Less
        );
        let r = q.refine(&rational(1, 1 << 20)).unwrap();
        assert!(r.width() <= rational(1, 1 << 20));
    }

    #[test]
    fn same_field_arithmetic_stays_exact() {
        let x = real("1/2").add(&real("sqrt(2)").mul_rational(&integer(6)));
        assert_eq!(x.to_string(), "1/2+6*sqrt(2)");
        let y = x.div(&real("sqrt(2)")).unwrap();
        assert_eq!(y.to_string(), "6+1/4*sqrt(2)");
        assert!(real("0").recip().is_err());
        assert!(opaque("0").recip().is_err());
    }

    #[test]
    fn refine_rejects_nonpositive_width() {
        assert!(real("sqrt(2)").refine(&integer(0)).is_err());
    }
}
