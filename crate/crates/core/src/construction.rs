//! The set family `S(N)` and the sets derived from it.
//!
//! `[0, 1)` is cut into `N` pieces `Q_i = [i/N, (i+1)/N)` and `R_i = [0,1) ∖ Q_i`.
//! Cells `S_m` for `m ≥ 0` are translates `m + R_i`, where `i ≡ k (mod N)` and
//! `k` is the block of `m`, i.e. `β_k ≤ m < β_{k+1}` with
//! `β_k = Σ_{j<k} (N+1)^j`. Cells for `m < 0` are `S_m = 2m + S_{|m|}`, which is
//! again `m + R_i` with the residue taken from `|m|`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::real::CertifiedReal;
use crate::scalar::{pow2_neg, ExactField, Rational};
use crate::spec::SetSpec;

/// `β_k = ((N+1)^k − 1)/N`.
pub fn beta(n: u64, k: u64) -> BigInt {
    assert!(n >= 1, "N must be at least 1");
    let base = BigInt::from(n) + 1;
    let exp = usize::try_from(k).expect("block index fits in usize");
    (num_traits::pow(base, exp) - 1) / BigInt::from(n)
}

/// Position of a cell index in the block structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIndex {
    pub k: u64,
    #[serde(with = "crate::exact_str")]
    pub beta_k: BigInt,
    #[serde(with = "crate::exact_str")]
    pub beta_k1: BigInt,
    pub residue: u64,
}

/// The block `k` with `β_k ≤ m < β_{k+1}`, found with the exact recurrence
/// `β_{k+1} = (N+1)β_k + 1`.
///
/// # Panics
/// If `n == 0` or `m < 0`.
pub fn block_index(n: u64, m: &BigInt) -> BlockIndex {
    assert!(n >= 1, "N must be at least 1");
    assert!(!m.is_negative(), "block_index needs m >= 0");
    let base = BigInt::from(n) + 1;
    let mut k = 0u64;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::one();
    while &hi <= m {
        lo = hi;
        hi = &base * &lo + 1;
        k += 1;
    }
    BlockIndex {
        k,
        beta_k: lo,
        beta_k1: hi,
        residue: k % n,
    }
}

/// Index `i` of the base cell `R_i` used at cell `m`, for any integer `m`.
pub fn cell_residue(n: u64, m: &BigInt) -> u64 {
    block_index(n, &m.abs()).residue
}

fn q_bounds(n: u64, i: u64) -> (Rational, Rational) {
    let nn = BigInt::from(n);
    (
        Rational::new(BigInt::from(i), nn.clone()),
        Rational::new(BigInt::from(i + 1), nn),
    )
}

/// `Q_i = [i/N, (i+1)/N)`.
pub fn deleted_subinterval(n: u64, i: u64) -> IntervalSet<Rational> {
    assert!(i < n, "subinterval index out of range");
    let (lo, hi) = q_bounds(n, i);
    IntervalSet::interval(lo, hi)
}

/// `R_i = [0, 1) ∖ Q_i`, of measure `1 − 1/N`.
pub fn base_cell(n: u64, i: u64) -> IntervalSet<Rational> {
    assert!(i < n, "subinterval index out of range");
    let (lo, hi) = q_bounds(n, i);
    IntervalSet::from_intervals([(Rational::zero(), lo), (hi, Rational::one())])
}

/// `S ∩ [m, m+1)`.
pub fn cell(n: u64, m: &BigInt) -> IntervalSet<Rational> {
    if m.is_negative() {
        let positive = cell(n, &-m);
        return positive.translate(&Rational::from_integer(m * 2));
    }
    base_cell(n, block_index(n, m).residue).translate(&Rational::from_integer(m.clone()))
}

/// Data showing why a point of the line misses `S(N)`: it sits in cell `m`,
/// whose block `k` has residue `j`, and its fractional part lies in `Q_j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockWitness {
    pub point: CertifiedReal,
    #[serde(with = "crate::exact_str")]
    pub m: BigInt,
    pub k: u64,
    pub j: u64,
    /// `m + Q_j`.
    pub forbidden: IntervalSet<Rational>,
}

/// Explanation of a failed membership test.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exclusion {
    Block(BlockWitness),
    /// The point lies in the removed component `[lo, hi)`.
    Complement {
        point: CertifiedReal,
        removed: IntervalSet<Rational>,
    },
    /// `x/r` misses the inner set.
    Scaled {
        point: CertifiedReal,
        inner: Box<Exclusion>,
    },
}

fn basic_exclusion(n: u64, x: &CertifiedReal) -> Result<Option<Exclusion>> {
    let m = x.floor()?;
    let block = block_index(n, &m.abs());
    let i = x.locate_subinterval(n)?;
    if i != block.residue {
        return Ok(None);
    }
    let forbidden = deleted_subinterval(n, i).translate(&Rational::from_integer(m.clone()));
    Ok(Some(Exclusion::Block(BlockWitness {
        point: x.clone(),
        m,
        k: block.k,
        j: block.residue,
        forbidden,
    })))
}

/// Why `x` misses a one-dimensional set, or `None` when `x` belongs to it.
pub fn exclusion_1d(spec: &SetSpec, x: &CertifiedReal) -> Result<Option<Exclusion>> {
    match spec {
        SetSpec::Basic { n } => basic_exclusion(*n, x),
        SetSpec::ScaledIntersection { inner, r } => {
            if let Some(reason) = exclusion_1d(inner, x)? {
                return Ok(Some(reason));
            }
            let shrunk = x.div(&CertifiedReal::from_quadratic(r.clone()))?;
            Ok(
                exclusion_1d(inner, &shrunk)?.map(|reason| Exclusion::Scaled {
                    point: shrunk,
                    inner: Box::new(reason),
                }),
            )
        }
        SetSpec::ExplicitComplement { removed } => {
            let (mut left, mut right) = (0usize, removed.len());
            let pieces = removed.intervals();
            while left < right {
                let mid = (left + right) / 2;
                if x.cmp_rational(&pieces[mid].0)? != Ordering::Less {
                    left = mid + 1;
                } else {
                    right = mid;
                }
            }
            if left == 0 || x.cmp_rational(&pieces[left - 1].1)? != Ordering::Less {
                return Ok(None);
            }
            let (lo, hi) = pieces[left - 1].clone();
            Ok(Some(Exclusion::Complement {
                point: x.clone(),
                removed: IntervalSet::interval(lo, hi),
            }))
        }
        SetSpec::Product { .. } => Err(Error::DimensionMismatch {
            expected: spec.dimension(),
            got: 1,
        }),
    }
}

/// Why `point` misses `spec`: the first failing coordinate and its reason.
pub fn exclusion(spec: &SetSpec, point: &[CertifiedReal]) -> Result<Option<(usize, Exclusion)>> {
    if point.len() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension(),
            got: point.len(),
        });
    }
    match spec {
        SetSpec::Product { factors } => {
            let mut offset = 0;
            for factor in factors {
                let dim = factor.dimension();
                if let Some((c, reason)) = exclusion(factor, &point[offset..offset + dim])? {
                    return Ok(Some((offset + c, reason)));
                }
                offset += dim;
            }
            Ok(None)
        }
        _ => Ok(exclusion_1d(spec, &point[0])?.map(|reason| (0, reason))),
    }
}

/// Membership of a point with certified coordinates.
pub fn contains(spec: &SetSpec, point: &[CertifiedReal]) -> Result<bool> {
    Ok(exclusion(spec, point)?.is_none())
}

pub fn contains_1d(spec: &SetSpec, x: &CertifiedReal) -> Result<bool> {
    Ok(exclusion_1d(spec, x)?.is_none())
}

/// Exact representation of `S ∩ [a, b)` for a one-dimensional spec.
///
/// Works in any exact field containing the endpoints. Scaled intersections
/// need a field that contains their scale factor, e.g. `QuadraticNumber`.
pub fn window<T: ExactField>(spec: &SetSpec, a: &T, b: &T) -> Result<IntervalSet<T>> {
    if a >= b {
        return Err(Error::InvalidParameter(format!(
            "window [{a:?}, {b:?}) is empty"
        )));
    }
    let clip = IntervalSet::interval(a.clone(), b.clone());
    match spec {
        SetSpec::Basic { n } => {
            let first = a.floor_int();
            let last = b.ceil_int();
            let mut pieces = Vec::new();
            let mut m = first;
            while m < last {
                let c = cell(*n, &m);
                pieces.extend(
                    c.intervals()
                        .iter()
                        .map(|(lo, hi)| (T::from_rational(lo), T::from_rational(hi))),
                );
                m += 1;
            }
            Ok(IntervalSet::from_intervals(pieces).intersect(&clip))
        }
        SetSpec::ExplicitComplement { removed } => {
            Ok(clip.subtract(&removed.map_endpoints(T::from_rational)))
        }
        SetSpec::ScaledIntersection { inner, r } => {
            let factor = T::from_quadratic(r).ok_or_else(|| {
                Error::UnsupportedSpec(format!(
                    "window of a set scaled by {r} needs quadratic endpoints"
                ))
            })?;
            let direct = window(inner, a, b)?;
            let pulled = window(
                inner,
                &(a.clone() / factor.clone()),
                &(b.clone() / factor.clone()),
            )?;
            Ok(direct.intersect(&pulled.scale(&factor)))
        }
        SetSpec::Product { .. } => Err(Error::UnsupportedSpec(
            "windows are one-dimensional; test product membership instead".into(),
        )),
    }
}

/// Smallest `N` with `2/N ≤ 1 − λ`, so that every unit interval keeps
/// measure at least `λ`.
pub fn choose_n_for_lambda(lambda: &Rational) -> Result<u64> {
    if lambda.is_negative() || *lambda >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} must lie in [0, 1)"
        )));
    }
    let two = Rational::from_integer(BigInt::from(2));
    let n = (two / (Rational::one() - lambda)).ceil().to_integer();
    n.to_u64().ok_or(Error::Overflow(n))
}

/// A rational `μ` with `(λ + r)/(1 + r) ≤ μ < 1`: the midpoint between an
/// upper bound of the left end and 1.
pub fn choose_mu_for_lambda(lambda: &Rational, r: &CertifiedReal) -> Result<Rational> {
    if lambda.is_negative() || *lambda >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} must lie in [0, 1)"
        )));
    }
    if r.cmp_rational(&Rational::one())? != Ordering::Greater {
        return Err(Error::InvalidParameter(format!("r = {r} must exceed 1")));
    }
    let one = CertifiedReal::from_integer(1);
    let lower = r.add_rational(lambda).div(&one.add(r))?;
    let mut bits = 4u64;
    loop {
        let enclosure = lower.refine(&pow2_neg(bits))?;
        let (_, hi) = enclosure.enclosure();
        if *hi < Rational::one() {
            return Ok((hi + Rational::one()) / Rational::from_integer(BigInt::from(2)));
        }
        if bits > 4096 {
            return Err(Error::UndecidableBoundary {
                width: pow2_neg(bits),
            });
        }
        bits *= 2;
    }
}

/// `S(N)` with `N` chosen so that every unit interval keeps measure `≥ λ`.
pub fn avoiding_set_for_lambda(lambda: &Rational) -> Result<SetSpec> {
    SetSpec::basic(choose_n_for_lambda(lambda)?)
}

/// `T = S ∩ rS` with `S` dense enough that `T` keeps measure `≥ λ` on every
/// unit interval.
pub fn scaled_set_for_lambda(lambda: &Rational, r: &crate::QuadraticNumber) -> Result<SetSpec> {
    let mu = choose_mu_for_lambda(lambda, &CertifiedReal::from_quadratic(r.clone()))?;
    SetSpec::scaled(avoiding_set_for_lambda(&mu)?, r.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, rational};
    use crate::QuadraticNumber;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn set(pairs: &[(Rational, Rational)]) -> IntervalSet<Rational> {
        IntervalSet::from_intervals(pairs.iter().cloned())
    }

    fn real(s: &str) -> CertifiedReal {
        s.parse().unwrap()
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(3, 0), big(0));
        assert_eq!(beta(3, 2), big(1 + 4));
        assert_eq!(beta(3, 3), big(1 + 4 + 16));
        assert_eq!(beta(1, 4), big(1 + 2 + 4 + 8));
        // Exceeds 2^64.
        assert!(beta(3, 40) > BigInt::from(u64::MAX));
    }

    #[test]
    fn block_index_examples() {
        let b = block_index(3, &big(0));
        assert_eq!((b.k, b.residue), (0, 0));
        let b = block_index(3, &big(5));
        assert_eq!((b.k, b.residue), (2, 2));
        assert_eq!((b.beta_k, b.beta_k1), (big(5), big(21)));
        assert_eq!(block_index(3, &big(20)).k, 2);
        let b = block_index(3, &big(21));
        assert_eq!((b.k, b.residue), (3, 0));
    }

    #[test]
    fn block_index_agrees_with_beta() {
        for n in [1u64, 2, 3, 7] {
            for m in 0..400 {
                let b = block_index(n, &big(m));
                assert!(beta(n, b.k) <= big(m) && big(m) < beta(n, b.k + 1));
                assert_eq!(
                    b.beta_k1,
                    &b.beta_k + num_traits::pow(big(n as i64 + 1), b.k as usize)
                );
            }
        }
    }

    #[test]
    fn base_cells() {
        assert_eq!(base_cell(3, 0), set(&[(rational(1, 3), integer(1))]));
        assert_eq!(
            base_cell(3, 1),
            set(&[(integer(0), rational(1, 3)), (rational(2, 3), integer(1))])
        );
        assert!(base_cell(1, 0).is_empty());
        for i in 0..5 {
            assert_eq!(base_cell(5, i).measure(), rational(4, 5));
        }
    }

    #[test]
    fn cells() {
        assert_eq!(
            cell(3, &big(1)),
            set(&[(integer(1), rational(4, 3)), (rational(5, 3), integer(2))])
        );
        assert_eq!(
            cell(3, &big(-1)),
            set(&[
                (integer(-1), rational(-2, 3)),
                (rational(-1, 3), integer(0))
            ])
        );
        assert_eq!(cell(3, &big(5)), set(&[(integer(5), rational(17, 3))]));
        for m in -30..30 {
            let c = cell(3, &big(m));
            assert_eq!(c.measure(), rational(2, 3));
            assert_eq!(
                c.subtract(&IntervalSet::interval(integer(m), integer(m + 1))),
                IntervalSet::empty()
            );
        }
    }

    #[test]
    fn basic_windows() {
        let w = window(&SetSpec::Basic { n: 3 }, &integer(0), &integer(3)).unwrap();
        let expected = set(&[
            (rational(1, 3), rational(4, 3)),
            (rational(5, 3), rational(7, 3)),
            (rational(8, 3), integer(3)),
        ]);
        assert_eq!(w, expected);
        assert_eq!(w.measure(), integer(2));
        let w = window(&SetSpec::Basic { n: 3 }, &integer(0), &integer(1)).unwrap();
        assert_eq!(w.measure(), rational(2, 3));
        assert!(window(&SetSpec::Basic { n: 3 }, &integer(1), &integer(1)).is_err());
    }

    #[test]
    fn complement_window() {
        let spec = SetSpec::complement(set(&[(integer(0), rational(1, 2))]));
        let w = window(&spec, &integer(-1), &integer(1)).unwrap();
        assert_eq!(
            w,
            set(&[(integer(-1), integer(0)), (rational(1, 2), integer(1))])
        );
    }

    #[test]
    fn scaled_window_matches_pointwise_membership() {
        let r: QuadraticNumber = "sqrt(2)".parse().unwrap();
        let spec = SetSpec::scaled(SetSpec::Basic { n: 3 }, r).unwrap();
        let a = QuadraticNumber::from(integer(0));
        let b = QuadraticNumber::from(integer(6));
        let w = window(&spec, &a, &b).unwrap();
        assert!(w.is_normalized());
        assert!(window::<Rational>(&spec, &integer(0), &integer(1)).is_err());
        // Sample rational points and compare with direct membership.
        for t in 0..600 {
            let x = rational(2 * t + 1, 200);
            let inside = w.contains(&QuadraticNumber::from(x.clone()));
            assert_eq!(inside, contains_1d(&spec, &x.into()).unwrap(), "t = {t}");
        }
        // T ⊆ S, so T's window is no larger.
        let s = window(&SetSpec::Basic { n: 3 }, &integer(0), &integer(6)).unwrap();
        assert!(w.measure() <= QuadraticNumber::from(s.measure()));
    }

    #[test]
    fn membership_examples() {
        let s = SetSpec::Basic { n: 3 };
        assert!(contains_1d(&s, &real("1/2")).unwrap());
        assert!(!contains_1d(&s, &real("3/2")).unwrap());
        assert!(contains_1d(&s, &real("1/2+sqrt(2)")).unwrap());
        let p = SetSpec::power(s.clone(), 2).unwrap();
        assert!(contains(&p, &[real("1/2"), real("1/2")]).unwrap());
        let (c, _) = exclusion(&p, &[real("1/2"), real("3/2")]).unwrap().unwrap();
        assert_eq!(c, 1);
        assert!(contains(&p, &[real("1/2")]).is_err());
        assert!(!contains_1d(&SetSpec::Basic { n: 1 }, &real("1/2")).unwrap());
    }

    #[test]
    fn membership_agrees_with_cells() {
        for n in [1u64, 2, 3, 5] {
            let spec = SetSpec::Basic { n };
            for t in -400..400 {
                let x = rational(t, 7);
                let m = x.floor().to_integer();
                let by_cell = cell(n, &m).contains(&x);
                assert_eq!(contains_1d(&spec, &x.into()).unwrap(), by_cell);
            }
        }
    }

    #[test]
    fn lambda_choices() {
        assert_eq!(choose_n_for_lambda(&integer(0)).unwrap(), 2);
        assert_eq!(choose_n_for_lambda(&rational(9, 10)).unwrap(), 20);
        assert_eq!(choose_n_for_lambda(&rational(1, 2)).unwrap(), 4);
        assert!(choose_n_for_lambda(&integer(1)).is_err());

        let mu = choose_mu_for_lambda(&integer(0), &real("2")).unwrap();
        assert_eq!(mu, rational(5, 6));
        let r = real("sqrt(2)");
        let mu = choose_mu_for_lambda(&rational(1, 2), &r).unwrap();
        // (1/2 + √2)/(1 + √2) ≤ μ  ⟺  1/2 + √2 ≤ μ(1 + √2)
        let lhs = QuadraticNumber::from(rational(1, 2)) + "sqrt(2)".parse().unwrap();
        let rhs = QuadraticNumber::from(mu.clone()) * "1+sqrt(2)".parse().unwrap();
        assert!(lhs <= rhs && mu < integer(1));
        let near_one = choose_mu_for_lambda(&rational(999, 1000), &r).unwrap();
        assert!(near_one > rational(999, 1000) && near_one < integer(1));
        assert!(choose_mu_for_lambda(&integer(0), &real("1")).is_err());
    }

    #[test]
    fn scaled_set_keeps_density() {
        let r: QuadraticNumber = "sqrt(2)".parse().unwrap();
        let spec = scaled_set_for_lambda(&rational(1, 2), &r).unwrap();
        let lambda = QuadraticNumber::from(rational(1, 2));
        for t in 0..20 {
            let a = QuadraticNumber::from(rational(t * 7, 3));
            let b = a.clone() + QuadraticNumber::one();
            assert!(window(&spec, &a, &b).unwrap().measure() >= lambda);
        }
    }
}
