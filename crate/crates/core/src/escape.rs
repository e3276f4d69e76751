//! Certificates that an arithmetic progression `x + Δℕ` leaves a set.
//!
//! Rational gaps are handled constructively. With `Δ = p/q`, the terms
//! `x + Δ·(qt) = x + pt` form an integer-gap sub-progression whose fractional
//! parts all equal `⟨x⟩ ∈ Q_j`. Such a term is excluded exactly when its cell
//! belongs to a block with residue `j`, and a block `k ≡ j (mod N)` lying beyond
//! `x` and longer than `p` cannot be jumped over, so walking the blocks in the
//! order the sub-progression visits them always ends in a witness.
//!
//! Irrational gaps admit no computable escape bound, so they are searched term
//! by term up to a caller-chosen depth.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::construction::{beta, block_index, exclusion, exclusion_1d, BlockWitness, Exclusion};
use crate::error::{Error, Result};
use crate::real::CertifiedReal;
use crate::scalar::{ceil_div, Rational};
use crate::spec::SetSpec;
use std::cmp::Ordering;

/// `start + n·gap` for `n ∈ ℕ`, in any dimension.
#[derive(Clone, Debug)]
pub struct Progression {
    start: Vec<CertifiedReal>,
    gap: Vec<CertifiedReal>,
    projection: usize,
    refine_limit: Option<Rational>,
}

impl Progression {
    /// Fails with [`Error::ZeroGap`] unless some gap coordinate is exactly
    /// nonzero.
    pub fn new(start: Vec<CertifiedReal>, gap: Vec<CertifiedReal>) -> Result<Self> {
        if start.is_empty() || start.len() != gap.len() {
            return Err(Error::DimensionMismatch {
                expected: start.len(),
                got: gap.len(),
            });
        }
        let mut projection = None;
        for (i, g) in gap.iter().enumerate() {
            if g.signum()? != Ordering::Equal {
                projection = Some(i);
                break;
            }
        }
        Ok(Self {
            start,
            gap,
            projection: projection.ok_or(Error::ZeroGap)?,
            refine_limit: None,
        })
    }

    pub fn one_dim(x0: CertifiedReal, delta: CertifiedReal) -> Result<Self> {
        Self::new(vec![x0], vec![delta])
    }

    /// Narrowest enclosure width used when deciding membership of opaque terms.
    pub fn with_refine_limit(mut self, limit: Rational) -> Self {
        self.refine_limit = Some(limit);
        self
    }

    pub fn dimension(&self) -> usize {
        self.start.len()
    }

    pub fn start(&self) -> &[CertifiedReal] {
        &self.start
    }

    pub fn gap(&self) -> &[CertifiedReal] {
        &self.gap
    }

    /// First coordinate with a nonzero gap component.
    pub fn projection_coordinate(&self) -> usize {
        self.projection
    }

    pub fn term(&self, n: &BigInt) -> Vec<CertifiedReal> {
        let n = Rational::from_integer(n.clone());
        self.start
            .iter()
            .zip(&self.gap)
            .map(|(x, g)| {
                let t = x.add(&g.mul_rational(&n));
                match &self.refine_limit {
                    Some(limit) => t.with_refine_limit(limit.clone()),
                    None => t,
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ConstructiveRational,
    BoundedSearch,
}

/// Bookkeeping of a constructive certificate for `Δ = p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructiveDetail {
    /// Signed integer gap `±p` of the sub-progression `x ± p·t`.
    #[serde(with = "crate::exact_str")]
    pub integer_gap: BigInt,
    /// `q`: the certificate index is `n = q·t`.
    #[serde(with = "crate::exact_str")]
    pub stride: BigInt,
    #[serde(with = "crate::exact_str")]
    pub sub_index: BigInt,
    /// Smallest block meeting the three block conditions; the sub-progression
    /// cannot pass it without landing inside.
    pub bound_block: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EscapeCertificate {
    #[serde(with = "crate::exact_str")]
    pub n: BigInt,
    /// `x_n`, one entry per coordinate.
    pub term: Vec<CertifiedReal>,
    /// Coordinate whose membership fails.
    pub coordinate: usize,
    /// First coordinate with a nonzero gap, onto which the search projects.
    pub projected_coordinate: usize,
    pub exclusion: Exclusion,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub construction: Option<ConstructiveDetail>,
}

impl EscapeCertificate {
    pub fn x_n(&self) -> &CertifiedReal {
        &self.term[self.coordinate]
    }

    /// Cell, block, residue and forbidden subinterval, when the failing point
    /// lies directly outside a basic set.
    pub fn block_witness(&self) -> Option<&BlockWitness> {
        let mut reason = &self.exclusion;
        loop {
            match reason {
                Exclusion::Block(w) => return Some(w),
                Exclusion::Scaled { inner, .. } => reason = inner,
                Exclusion::Complement { .. } => return None,
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Escaped(Box<EscapeCertificate>),
    NoWitnessWithinDepth { depth: u64 },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&EscapeCertificate> {
        match self {
            SearchOutcome::Escaped(c) => Some(c),
            SearchOutcome::NoWitnessWithinDepth { .. } => None,
        }
    }
}

/// Regions of the line on which the cells share one block: `z ≥ 0` is
/// `[β_z, β_{z+1})`, and `z < 0` is the mirrored block `|z|` of negative cells,
/// `[1 − β_{|z|+1}, 1 − β_{|z|})`.
fn region_bounds(n: u64, z: i64) -> (Rational, Rational) {
    let k = z.unsigned_abs();
    let (b0, b1) = (beta(n, k), beta(n, k + 1));
    if z >= 0 {
        (Rational::from_integer(b0), Rational::from_integer(b1))
    } else {
        (
            Rational::from_integer(BigInt::one() - b1),
            Rational::from_integer(BigInt::one() - b0),
        )
    }
}

fn region_of(n: u64, m: &BigInt) -> i64 {
    let k = i64::try_from(block_index(n, &m.abs()).k).expect("block index fits in i64");
    if m.is_negative() {
        -k
    } else {
        k
    }
}

/// Conditions on block `k` for a sub-progression from `x` with signed integer
/// gap `p`, in the direction of travel: the block lies beyond `x`, it is
/// longer than `|p|`, and `k ≡ j (mod N)` where `⟨x⟩ ∈ Q_j`.
pub fn block_conditions(n: u64, x: &Rational, integer_gap: &BigInt, k: u64) -> [bool; 3] {
    let j = crate::CertifiedReal::from_rational(x.clone())
        .locate_subinterval(n)
        .expect("rationals are decided exactly");
    let length = num_traits::pow(BigInt::from(n) + 1, k as usize);
    let beyond = if integer_gap.is_positive() {
        Rational::from_integer(beta(n, k)) > *x
    } else {
        k >= 1 && Rational::from_integer(BigInt::one() - beta(n, k)) <= *x
    };
    [beyond, length > integer_gap.abs(), k % n == j]
}

fn bound_block(n: u64, x: &Rational, integer_gap: &BigInt) -> u64 {
    let mut k = 0;
    while !block_conditions(n, x, integer_gap, k).iter().all(|&c| c) {
        k += 1;
    }
    k
}

/// First index `t` with `x + gap·t ∈ [lo, hi)`, if the sub-progression
/// visits that region.
fn landing(x: &Rational, gap: &BigInt, lo: &Rational, hi: &Rational) -> Option<BigInt> {
    let p = Rational::from_integer(gap.abs());
    let t = if gap.is_positive() {
        if lo > x {
            ceil_div(&(lo - x), &p)
        } else {
            BigInt::zero()
        }
    } else if x < hi {
        BigInt::zero()
    } else {
        ((x - hi) / &p).floor().to_integer() + 1
    };
    let y = x + Rational::from_integer(gap * &t);
    (&y >= lo && &y < hi).then_some(t)
}

/// Constructive certificate that `x + Δℕ ⊄ S(N)` for rational `Δ ≠ 0`.
///
/// Returns the first escaping term of the sub-progression `x + Δ·qℕ`.
pub fn certify_escape_rational(
    n: u64,
    x: &Rational,
    delta: &Rational,
) -> Result<EscapeCertificate> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if delta.is_zero() {
        return Err(Error::ZeroGap);
    }
    let spec = SetSpec::Basic { n };
    let start = CertifiedReal::from_rational(x.clone());
    if exclusion_1d(&spec, &start)?.is_some() {
        return Err(Error::NotInSet { x: x.to_string() });
    }
    let j = start.locate_subinterval(n)?;
    let stride = delta.denom().clone();
    let integer_gap = delta.numer().clone();
    let bound = bound_block(n, x, &integer_gap);
    let step: i64 = if integer_gap.is_positive() { 1 } else { -1 };
    let bound_region = step * i64::try_from(bound).expect("block index fits in i64");

    let mut z = region_of(n, &x.floor().to_integer());
    loop {
        assert!(
            (z - bound_region) * step <= 0,
            "walked past the bound block without landing"
        );
        if z.unsigned_abs() % n == j {
            let (lo, hi) = region_bounds(n, z);
            if let Some(t) = landing(x, &integer_gap, &lo, &hi) {
                let y = x + Rational::from_integer(&integer_gap * &t);
                let point = CertifiedReal::from_rational(y);
                let reason = exclusion_1d(&spec, &point)?
                    .expect("a term with fractional part in Q_j inside a j-block is excluded");
                return Ok(EscapeCertificate {
                    n: &stride * &t,
                    term: vec![point],
                    coordinate: 0,
                    projected_coordinate: 0,
                    exclusion: reason,
                    method: Method::ConstructiveRational,
                    construction: Some(ConstructiveDetail {
                        integer_gap,
                        stride,
                        sub_index: t,
                        bound_block: bound,
                    }),
                });
            }
        }
        z += step;
    }
}

/// Least `n ≤ depth` with `x_n ∉ spec`.
///
/// Every coordinate is tested, so for products the returned index is the least
/// one at which the full vector leaves the set; the projection argument
/// guarantees that the coordinate with a nonzero gap eventually fails.
pub fn certify_escape_search(
    spec: &SetSpec,
    prog: &Progression,
    depth: u64,
) -> Result<SearchOutcome> {
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "search depth must be at least 1".into(),
        ));
    }
    if prog.dimension() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension(),
            got: prog.dimension(),
        });
    }
    for i in 0..=depth {
        let n = BigInt::from(i);
        let term = prog.term(&n);
        if let Some((coordinate, reason)) = exclusion(spec, &term)? {
            return Ok(SearchOutcome::Escaped(Box::new(EscapeCertificate {
                n,
                term,
                coordinate,
                projected_coordinate: prog.projection_coordinate(),
                exclusion: reason,
                method: Method::BoundedSearch,
                construction: None,
            })));
        }
    }
    Ok(SearchOutcome::NoWitnessWithinDepth { depth })
}

/// Re-checks a certificate against the progression and set: the stored term
/// must equal `x_n`, must miss the set, and a block witness must be
/// consistent with the block structure.
pub fn verify_certificate(
    spec: &SetSpec,
    prog: &Progression,
    cert: &EscapeCertificate,
) -> Result<bool> {
    let term = prog.term(&cert.n);
    if term.len() != cert.term.len() {
        return Ok(false);
    }
    for (a, b) in term.iter().zip(&cert.term) {
        match a.exact_eq(b) {
            Some(true) => {}
            Some(false) => return Ok(false),
            None => {
                if a.sub(b).signum()? != Ordering::Equal {
                    return Ok(false);
                }
            }
        }
    }
    if exclusion(spec, &term)?.is_none() {
        return Ok(false);
    }
    if let Some(w) = cert.block_witness() {
        let n = match find_basic_n(spec, cert.coordinate) {
            Some(n) => n,
            None => return Ok(false),
        };
        let block = block_index(n, &w.m.abs());
        if w.point.floor()? != w.m
            || block.k != w.k
            || block.residue != w.j
            || !w.forbidden.contains_point(&w.point)?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

fn find_basic_n(spec: &SetSpec, coordinate: usize) -> Option<u64> {
    match spec {
        SetSpec::Basic { n } => (coordinate == 0).then_some(*n),
        SetSpec::ScaledIntersection { inner, .. } => find_basic_n(inner, coordinate),
        SetSpec::ExplicitComplement { .. } => None,
        SetSpec::Product { factors } => {
            let mut offset = 0;
            for f in factors {
                let d = f.dimension();
                if coordinate < offset + d {
                    return find_basic_n(f, coordinate - offset);
                }
                offset += d;
            }
            None
        }
    }
}

/// Number of terms of `x0 + Δℕ` below `a`, i.e. `⌈(a − x0)/Δ⌉` when `a > x0`
/// and `0` otherwise. For `x0 ≥ 0` this is the count inside `[0, a)`.
pub fn count_in_half_open(x0: &Rational, delta: &Rational, a: &Rational) -> BigInt {
    assert!(
        delta.is_positive(),
        "count_in_half_open needs a positive gap"
    );
    if a > x0 {
        ceil_div(&(a - x0), delta)
    } else {
        BigInt::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
}

/// Exact evaluation of the share of terms below `β_k` that fall in
/// `I = [β_k/(N+1), β_k)`, together with the bounds that force it above
/// `N/(N+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimOneReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    #[serde(with = "crate::exact_str")]
    pub beta_k: BigInt,
    /// Terms inside `I`.
    #[serde(with = "crate::exact_str")]
    pub in_interval: BigInt,
    /// Terms below `β_k`, i.e. `M + 1`.
    #[serde(with = "crate::exact_str")]
    pub total: BigInt,
    #[serde(with = "crate::exact_str::rational")]
    pub fraction: Rational,
    #[serde(with = "crate::exact_str::rational")]
    pub threshold: Rational,
    pub lower_bound_holds: bool,
    /// `(β_k − ((N+1)/N)Δ) / (β_k − x0 + Δ)`, when the denominator is positive.
    #[serde(with = "option_rational", default)]
    pub ratio: Option<Rational>,
    pub ratio_exceeds_one: bool,
    /// `fraction > (N/(N+1)) · ratio`.
    pub chain_holds: bool,
    pub hypotheses: Vec<HypothesisCheck>,
}

mod option_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(q) => s.collect_str(q),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Share of the terms of `x0 + Δℕ` below `β_k` that lie in `[β_k/(N+1), β_k)`.
///
/// Checks the hypotheses `x0 > ((2N+1)/N)Δ`, `(N/(N+1))β_k > Δ` and
/// `β_k > x0`; if any fails the report is still computed and returned inside
/// [`Error::PreconditionUnmet`].
pub fn claim1_verify(n: u64, x0: &Rational, delta: &Rational, k: u64) -> Result<ClaimOneReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !delta.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "gap {delta} must be positive"
        )));
    }
    let nq = Rational::from_integer(BigInt::from(n));
    let n1 = &nq + Rational::one();
    let beta_k = beta(n, k);
    let bk = Rational::from_integer(beta_k.clone());
    let total = count_in_half_open(x0, delta, &bk);
    let below_interval = count_in_half_open(x0, delta, &(&bk / &n1));
    let in_interval = &total - below_interval;
    let fraction = if total.is_zero() {
        Rational::zero()
    } else {
        Rational::new(in_interval.clone(), total.clone())
    };
    let threshold = &nq / &n1;
    let denominator = &bk - x0 + delta;
    let ratio = denominator
        .is_positive()
        .then(|| (&bk - &n1 / &nq * delta) / denominator);
    let ratio_exceeds_one = ratio.as_ref().is_some_and(|r| *r > Rational::one());
    let chain_holds = ratio.as_ref().is_some_and(|r| fraction > &threshold * r);

    let two_n1 = Rational::from_integer(BigInt::from(2 * n + 1));
    let hypotheses = vec![
        HypothesisCheck {
            name: "x0 > ((2N+1)/N)·delta".into(),
            holds: *x0 > two_n1 / &nq * delta,
        },
        HypothesisCheck {
            name: "(N/(N+1))·beta_k > delta".into(),
            holds: &threshold * &bk > *delta,
        },
        HypothesisCheck {
            name: "beta_k > x0".into(),
            holds: bk > *x0,
        },
    ];
    let report = ClaimOneReport {
        n,
        k,
        beta_k,
        in_interval,
        total,
        lower_bound_holds: fraction > threshold,
        fraction,
        threshold,
        ratio,
        ratio_exceeds_one,
        chain_holds,
        hypotheses,
    };
    let failed: Vec<String> = report
        .hypotheses
        .iter()
        .filter(|h| !h.holds)
        .map(|h| h.name.clone())
        .collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(Error::PreconditionUnmet {
            failed,
            report: Box::new(report),
        })
    }
}
