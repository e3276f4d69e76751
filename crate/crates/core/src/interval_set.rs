//! Finite unions of half-open intervals `[lo, hi)` in normalized form.
//!
//! Invariants held by every [`IntervalSet`]:
//!  - `lo < hi` for each interval
//!  - intervals are sorted and pairwise disjoint
//!  - neighbours are not mergeable (`hi_i < lo_{i+1}`)
//!
//! Union, intersection and difference are linear merges over the sorted lists.

use std::cmp::Ordering;
use std::fmt::{self, Display};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::real::CertifiedReal;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSet<T> {
    intervals: Vec<(T, T)>,
}

impl<T> Default for IntervalSet<T> {
    fn default() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }
}

fn by_lo<T: PartialOrd>(a: &(T, T), b: &(T, T)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
}

fn max_ref<'a, T: PartialOrd>(a: &'a T, b: &'a T) -> &'a T {
    if a >= b {
        a
    } else {
        b
    }
}

fn min_ref<'a, T: PartialOrd>(a: &'a T, b: &'a T) -> &'a T {
    if a <= b {
        a
    } else {
        b
    }
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `[lo, hi)`, empty when `lo >= hi`.
    pub fn interval(lo: T, hi: T) -> Self {
        if lo < hi {
            Self {
                intervals: vec![(lo, hi)],
            }
        } else {
            Self::empty()
        }
    }

    /// Normalizes an arbitrary list of pairs, dropping empty ones.
    pub fn from_intervals(pairs: impl IntoIterator<Item = (T, T)>) -> Self {
        let mut pairs: Vec<(T, T)> = pairs.into_iter().filter(|(lo, hi)| lo < hi).collect();
        pairs.sort_by(by_lo);
        let mut out: Vec<(T, T)> = Vec::with_capacity(pairs.len());
        for (lo, hi) in pairs {
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn into_intervals(self) -> Vec<(T, T)> {
        self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Smallest `lo` and largest `hi`, if nonempty.
    pub fn bounds(&self) -> Option<(&T, &T)> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some((&first.0, &last.1))
    }

    /// Checks the normalization invariants.
    pub fn is_normalized(&self) -> bool {
        self.intervals.iter().all(|(lo, hi)| lo < hi)
            && self.intervals.windows(2).all(|w| w[0].1 < w[1].0)
    }

    pub fn measure(&self) -> T {
        self.intervals
            .iter()
            .fold(T::zero(), |acc, (lo, hi)| acc + (hi.clone() - lo.clone()))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.intervals.iter().chain(other.intervals.iter()).cloned())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = max_ref(&a[i].0, &b[j].0);
            let hi = min_ref(&a[i].1, &b[j].1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { intervals: out }
    }

    pub fn subtract(&self, other: &Self) -> Self {
        let b = &other.intervals;
        let mut j = 0;
        let mut out = Vec::new();
        for (lo, hi) in &self.intervals {
            while j < b.len() && b[j].1 <= *lo {
                j += 1;
            }
            let mut cursor = lo.clone();
            let mut k = j;
            while k < b.len() && b[k].0 < *hi {
                if b[k].0 > cursor {
                    out.push((cursor.clone(), b[k].0.clone()));
                }
                if b[k].1 > cursor {
                    cursor = b[k].1.clone();
                }
                k += 1;
            }
            if cursor < *hi {
                out.push((cursor, hi.clone()));
            }
        }
        Self { intervals: out }
    }

    /// Half-open membership test.
    pub fn contains(&self, x: &T) -> bool {
        let idx = self.intervals.partition_point(|(lo, _)| lo <= x);
        idx > 0 && *x < self.intervals[idx - 1].1
    }

    /// The component containing `x`, if any.
    pub fn component_containing(&self, x: &T) -> Option<&(T, T)> {
        let idx = self.intervals.partition_point(|(lo, _)| lo <= x);
        (idx > 0 && *x < self.intervals[idx - 1].1).then(|| &self.intervals[idx - 1])
    }

    /// Image under `t ↦ t + by`.
    pub fn translate(&self, by: &T) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .map(|(lo, hi)| (lo.clone() + by.clone(), hi.clone() + by.clone()))
                .collect(),
        }
    }

    /// Image under `t ↦ factor · t`.
    ///
    /// # Panics
    /// If `factor <= 0`; a reflection would turn `[lo, hi)` into `(−hi, −lo]`.
    pub fn scale(&self, factor: &T) -> Self {
        assert!(*factor > T::zero(), "scale factor must be positive");
        Self {
            intervals: self
                .intervals
                .iter()
                .map(|(lo, hi)| (lo.clone() * factor.clone(), hi.clone() * factor.clone()))
                .collect(),
        }
    }

    /// Maps endpoints through a strictly increasing function.
    pub fn map_endpoints<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> IntervalSet<U> {
        IntervalSet::from_intervals(self.intervals.iter().map(|(lo, hi)| (f(lo), f(hi))))
    }
}

impl IntervalSet<Rational> {
    /// Half-open membership of a certified real, decided exactly for rational
    /// and quadratic-irrational points.
    pub fn contains_point(&self, x: &CertifiedReal) -> Result<bool> {
        // Binary search for the last interval with lo <= x.
        let (mut left, mut right) = (0usize, self.intervals.len());
        while left < right {
            let mid = (left + right) / 2;
            if x.cmp_rational(&self.intervals[mid].0)? != Ordering::Less {
                left = mid + 1;
            } else {
                right = mid;
            }
        }
        if left == 0 {
            return Ok(false);
        }
        Ok(x.cmp_rational(&self.intervals[left - 1].1)? == Ordering::Less)
    }
}

impl<T: Scalar + Display> Display for IntervalSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{lo}, {hi})")?;
        }
        Ok(())
    }
}

/// Serialized as a sorted array of `[lo, hi]` string pairs in exact form.
impl<T: Scalar + Display> Serialize for IntervalSet<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.intervals.len()))?;
        for (lo, hi) in &self.intervals {
            seq.serialize_element(&[lo.to_string(), hi.to_string()])?;
        }
        seq.end()
    }
}

impl<'de, T> Deserialize<'de> for IntervalSet<T>
where
    T: Scalar + FromStr,
    T::Err: Display,
{
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(String, String)> = Vec::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            let lo: T = lo.parse().map_err(D::Error::custom)?;
            let hi: T = hi.parse().map_err(D::Error::custom)?;
            if lo >= hi {
                return Err(D::Error::custom(format!(
                    "interval [{lo:?}, {hi:?}) is empty or reversed"
                )));
            }
            pairs.push((lo, hi));
        }
        Ok(Self::from_intervals(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn set(pairs: &[(i64, i64, i64, i64)]) -> IntervalSet<Rational> {
        IntervalSet::from_intervals(
            pairs
                .iter()
                .map(|&(a, b, c, d)| (rational(a, b), rational(c, d))),
        )
    }

    fn unit() -> IntervalSet<Rational> {
        set(&[(0, 1, 1, 1)])
    }

    fn r1() -> IntervalSet<Rational> {
        set(&[(0, 1, 1, 3), (2, 3, 1, 1)])
    }

    #[test]
    fn union_examples() {
        assert_eq!(unit().union(&set(&[(1, 1, 2, 1)])), set(&[(0, 1, 2, 1)]));
        assert_eq!(unit().union(&IntervalSet::empty()), unit());
        let u = set(&[(0, 1, 1, 3)]).union(&set(&[(2, 3, 1, 1)]));
        assert_eq!(u.len(), 2);
        assert_eq!(u, r1());
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(
            set(&[(0, 1, 2, 1)]).intersect(&set(&[(1, 1, 3, 1)])),
            set(&[(1, 1, 2, 1)])
        );
        assert_eq!(r1().intersect(&r1()), r1());
        // R_1 ∩ R_2 for N = 3.
        let r2 = set(&[(0, 1, 2, 3)]);
        assert_eq!(r1().intersect(&r2), set(&[(0, 1, 1, 3)]));
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(unit().subtract(&set(&[(1, 3, 2, 3)])), r1());
        assert_eq!(r1().subtract(&IntervalSet::empty()), r1());
        assert!(unit().subtract(&unit()).is_empty());
        assert_eq!(
            set(&[(0, 1, 10, 1)]).subtract(&set(&[(1, 1, 2, 1), (3, 1, 4, 1), (9, 1, 11, 1)])),
            set(&[(0, 1, 1, 1), (2, 1, 3, 1), (4, 1, 9, 1)])
        );
    }

    #[test]
    fn measure_examples() {
        assert_eq!(r1().measure(), rational(2, 3));
        assert_eq!(IntervalSet::<Rational>::empty().measure(), rational(0, 1));
        assert_eq!(set(&[(0, 1, 1, 3), (1, 2, 1, 1)]).measure(), rational(5, 6));
    }

    #[test]
    fn contains_point_half_open() {
        let a = set(&[(1, 3, 1, 1)]);
        let third: CertifiedReal = "1/3".parse().unwrap();
        let one: CertifiedReal = "1".parse().unwrap();
        assert!(a.contains_point(&third).unwrap());
        assert!(!a.contains_point(&one).unwrap());
        assert!(!r1().contains_point(&"1/2".parse().unwrap()).unwrap());
        let root2: CertifiedReal = "sqrt(2)".parse().unwrap();
        assert!(set(&[(1, 1, 3, 2)]).contains_point(&root2).unwrap());
        assert!(!set(&[(3, 2, 2, 1)]).contains_point(&root2).unwrap());
    }

    #[test]
    fn json_uses_exact_strings() {
        let json = serde_json::to_string(&r1()).unwrap();
        assert_eq!(json, r#"[["0","1/3"],["2/3","1"]]"#);
        let back: IntervalSet<Rational> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r1());
        assert!(serde_json::from_str::<IntervalSet<Rational>>(r#"[["1","0"]]"#).is_err());
    }

    #[test]
    fn works_over_floats() {
        let a = IntervalSet::from_intervals([(0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(a.intervals(), &[(0.0, 2.0)]);
        assert!(a.contains(&1.5));
        assert_eq!(a.scale(&2.0).measure(), 4.0);
    }
}
