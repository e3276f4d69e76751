//! Descriptions of the sets the library can build and query.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::quadratic::QuadraticNumber;
use crate::scalar::Rational;

/// A set of points in `ℝ^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub enum SetSpec {
    /// The progression-free set built from `N` deleted subintervals.
    Basic { n: u64 },
    /// `T = S ∩ rS` for an irrational quadratic `r > 1`.
    ScaledIntersection {
        inner: Box<SetSpec>,
        r: QuadraticNumber,
    },
    /// Cartesian product of the factors, in order.
    Product { factors: Vec<SetSpec> },
    /// `ℝ ∖ G` for a bounded finite union `G`.
    ExplicitComplement { removed: IntervalSet<Rational> },
}

impl SetSpec {
    pub fn basic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(SetSpec::Basic { n })
    }

    pub fn scaled(inner: SetSpec, r: QuadraticNumber) -> Result<Self> {
        if r.is_rational() {
            return Err(Error::InvalidParameter(format!(
                "scale factor {r} must be irrational"
            )));
        }
        if r.cmp(&QuadraticNumber::one()) != Ordering::Greater {
            return Err(Error::InvalidParameter(format!(
                "scale factor {r} must exceed 1"
            )));
        }
        if inner.dimension() != 1 {
            return Err(Error::UnsupportedSpec(
                "scaled intersection needs a one-dimensional inner set".into(),
            ));
        }
        if let Some(d) = inner.radicand() {
            if Some(&d) != r.radicand() {
                return Err(Error::UnsupportedSpec(format!(
                    "nested scale factors must share one quadratic field (sqrt({d}) vs {r})"
                )));
            }
        }
        Ok(SetSpec::ScaledIntersection {
            inner: Box::new(inner),
            r,
        })
    }

    pub fn product(factors: Vec<SetSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter(
                "a product needs at least one factor".into(),
            ));
        }
        Ok(SetSpec::Product { factors })
    }

    /// `spec × … × spec` with `dim` factors.
    pub fn power(spec: SetSpec, dim: usize) -> Result<Self> {
        Self::product(vec![spec; dim])
    }

    pub fn complement(removed: IntervalSet<Rational>) -> Self {
        SetSpec::ExplicitComplement { removed }
    }

    pub fn dimension(&self) -> usize {
        match self {
            SetSpec::Product { factors } => factors.iter().map(SetSpec::dimension).sum(),
            _ => 1,
        }
    }

    /// The radicand of the scale factors in a one-dimensional spec, if any.
    pub fn radicand(&self) -> Option<BigInt> {
        match self {
            SetSpec::ScaledIntersection { r, .. } => r.radicand().cloned(),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum SpecRepr {
    Basic {
        #[serde(rename = "N")]
        n: u64,
    },
    Scaled {
        inner: Box<SpecRepr>,
        r: String,
    },
    Product {
        factors: Vec<SpecRepr>,
    },
    Complement {
        #[serde(rename = "G")]
        removed: IntervalSet<Rational>,
    },
}

impl TryFrom<SpecRepr> for SetSpec {
    type Error = Error;
    fn try_from(repr: SpecRepr) -> Result<Self> {
        match repr {
            SpecRepr::Basic { n } => SetSpec::basic(n),
            SpecRepr::Scaled { inner, r } => SetSpec::scaled((*inner).try_into()?, r.parse()?),
            SpecRepr::Product { factors } => SetSpec::product(
                factors
                    .into_iter()
                    .map(SetSpec::try_from)
                    .collect::<Result<_>>()?,
            ),
            SpecRepr::Complement { removed } => Ok(SetSpec::complement(removed)),
        }
    }
}

impl From<SetSpec> for SpecRepr {
    fn from(spec: SetSpec) -> Self {
        match spec {
            SetSpec::Basic { n } => SpecRepr::Basic { n },
            SetSpec::ScaledIntersection { inner, r } => SpecRepr::Scaled {
                inner: Box::new((*inner).into()),
                r: r.to_string(),
            },
            SetSpec::Product { factors } => SpecRepr::Product {
                factors: factors.into_iter().map(Into::into).collect(),
            },
            SetSpec::ExplicitComplement { removed } => SpecRepr::Complement { removed },
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let json = serde_json::to_string(self).map_err(|_| fmt::Error)?;
        f.write_str(&json)
    }
}

/// Accepts the JSON form, or the shorthands `basic:N` and `scaled:N:r`.
impl FromStr for SetSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        if let Some((base, dim)) = s.rsplit_once('^') {
            let dim = dim
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid dimension in {s:?}")))?;
            return SetSpec::power(base.parse()?, dim);
        }
        let parse_n = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("invalid N in {s:?}")))
        };
        let mut parts = s.splitn(3, ':');
        match (parts.next(), parts.next(), parts.next()) {
            (Some("basic"), Some(n), None) => SetSpec::basic(parse_n(n)?),
            (Some("scaled"), Some(n), Some(r)) => {
                SetSpec::scaled(SetSpec::basic(parse_n(n)?)?, r.parse()?)
            }
            _ => Err(Error::Parse(format!(
                "unrecognised set description {s:?}; use basic:N, scaled:N:r, SPEC^d or JSON"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let basic: SetSpec = serde_json::from_str(r#"{"type":"basic","N":3}"#).unwrap();
        assert_eq!(basic, SetSpec::Basic { n: 3 });
        let scaled: SetSpec = serde_json::from_str(
            r#"{"type":"scaled","inner":{"type":"basic","N":3},"r":"sqrt(2)"}"#,
        )
        .unwrap();
        assert_eq!(scaled.radicand(), Some(BigInt::from(2)));
        let product: SetSpec = serde_json::from_str(
            r#"{"type":"product","factors":[{"type":"basic","N":3},{"type":"basic","N":5}]}"#,
        )
        .unwrap();
        assert_eq!(product.dimension(), 2);
        let complement: SetSpec =
            serde_json::from_str(r#"{"type":"complement","G":[["0","1/2"]]}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&complement).unwrap(),
            r#"{"type":"complement","G":[["0","1/2"]]}"#
        );
        for spec in [basic, scaled, product, complement] {
            let text = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<SetSpec>(&text).unwrap(), spec);
        }
    }

    #[test]
    fn validation() {
        assert!(SetSpec::basic(0).is_err());
        assert!(serde_json::from_str::<SetSpec>(r#"{"type":"basic","N":0}"#).is_err());
        let b = SetSpec::basic(3).unwrap();
        assert!(SetSpec::scaled(b.clone(), "2".parse().unwrap()).is_err());
        assert!(SetSpec::scaled(b.clone(), "sqrt(2)-1".parse().unwrap()).is_err());
        let t = SetSpec::scaled(b.clone(), "sqrt(2)".parse().unwrap()).unwrap();
        assert!(SetSpec::scaled(t.clone(), "sqrt(3)".parse().unwrap()).is_err());
        assert!(SetSpec::scaled(t, "1+sqrt(2)".parse().unwrap()).is_ok());
        assert!(SetSpec::product(vec![]).is_err());
        assert!(
            SetSpec::scaled(SetSpec::power(b, 2).unwrap(), "sqrt(2)".parse().unwrap()).is_err()
        );
    }

    #[test]
    fn shorthand() {
        assert_eq!(
            "basic:3".parse::<SetSpec>().unwrap(),
            SetSpec::Basic { n: 3 }
        );
        let s: SetSpec = "scaled:4:(1+sqrt(5))/2".parse().unwrap();
        assert!(matches!(s, SetSpec::ScaledIntersection { .. }));
        assert!("basic:x".parse::<SetSpec>().is_err());
        assert!("cube:3".parse::<SetSpec>().is_err());
        let p: SetSpec = "basic:3^2".parse().unwrap();
        assert_eq!(p.dimension(), 2);
        assert!("basic:3^0".parse::<SetSpec>().is_err());
    }
}
