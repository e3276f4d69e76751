//! Two-sided progressions inside sets whose complement has small measure.
//!
//! Given `G` with `|G| < ξ`, every `x` in
//! `I = I_0 ∖ ⋃_k (G ∩ I_k − 2kξ)`, where `I_k = (2kξ, 2(k+1)ξ)`, gives a
//! progression `x + 2ξℤ` avoiding `G`, and `|I| ≥ 2ξ − |G| > ξ`.
//!
//! The `I_k` are open. Pieces are computed with half-open intervals, which can
//! only differ from the open version at the lattice points `2kξ`; those pull
//! back to `0`, which [`ApWitness::left_open`] records as excluded.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApWitness {
    #[serde(with = "crate::exact_str::rational")]
    pub x: Rational,
    /// `2ξ`.
    #[serde(with = "crate::exact_str::rational")]
    pub gap: Rational,
    #[serde(with = "crate::exact_str::rational")]
    pub xi: Rational,
    /// The residual set `I ⊆ (0, 2ξ)`.
    pub residual_set: IntervalSet<Rational>,
    /// Whether the first component starts at `0`, which is excluded.
    pub left_open: bool,
    /// `2ξ − |G|`.
    #[serde(with = "crate::exact_str::rational")]
    pub measure_lower_bound: Rational,
}

/// `G ∩ [2kξ, 2(k+1)ξ)` moved back into `[0, 2ξ)`, over all `k` it meets.
fn pulled_back(g: &IntervalSet<Rational>, period: &Rational) -> IntervalSet<Rational> {
    let mut pieces = Vec::new();
    for (lo, hi) in g.intervals() {
        let first: BigInt = (lo / period).floor().to_integer();
        let last: BigInt = (hi / period).ceil().to_integer();
        let mut k = first;
        while k < last {
            let offset = period * Rational::from_integer(k.clone());
            let end = &offset + period;
            let a = lo.max(&offset).clone();
            let b = hi.min(&end).clone();
            if a < b {
                pieces.push((a - &offset, b - &offset));
            }
            k += 1;
        }
    }
    IntervalSet::from_intervals(pieces)
}

/// Builds a two-sided progression `x + 2ξℤ` avoiding `G`.
pub fn find_two_sided_ap(g: &IntervalSet<Rational>, xi: &Rational) -> Result<ApWitness> {
    if !xi.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "xi = {xi} must be positive"
        )));
    }
    let measure = g.measure();
    if measure >= *xi {
        return Err(Error::MeasureTooLarge {
            measure: Box::new(measure),
            xi: Box::new(xi.clone()),
        });
    }
    let period = xi * Rational::from_integer(BigInt::from(2));
    let base = IntervalSet::interval(Rational::zero(), period.clone());
    let residual = base.subtract(&pulled_back(g, &period));
    let bound = &period - &measure;
    assert!(
        residual.measure() >= bound,
        "residual set lost more than |G|"
    );
    let (lo, hi) = residual
        .intervals()
        .first()
        .cloned()
        .expect("residual set has measure above xi");
    let left_open = lo.is_zero();
    let x = (lo + hi) / Rational::from_integer(BigInt::from(2));
    Ok(ApWitness {
        x,
        gap: period,
        xi: xi.clone(),
        residual_set: residual,
        left_open,
        measure_lower_bound: bound,
    })
}

/// Checks `x + 2ξk ∉ G` for every `|k| ≤ range`.
pub fn verify_ap_avoids(g: &IntervalSet<Rational>, witness: &ApWitness, range: u64) -> bool {
    let range = i64::try_from(range).expect("range fits in i64");
    (-range..=range).all(|k| {
        let point = &witness.x + &witness.gap * Rational::from_integer(BigInt::from(k));
        !g.contains(&point)
    })
}
