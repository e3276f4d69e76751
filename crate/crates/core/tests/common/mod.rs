//! Reference implementations used to check the library from the outside.
//! Nothing here calls into the construction code.

#![allow(dead_code)]

use apavoid::{QuadraticNumber, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `((N+1)^k − 1)/N` straight from the closed form.
pub fn beta_closed(n: u64, k: u32) -> BigInt {
    (num_traits::pow(BigInt::from(n + 1), k as usize) - 1) / BigInt::from(n)
}

/// Residue of the cell at `m ≥ 0` by scanning the closed form.
pub fn residue_by_scan(n: u64, m: &BigInt) -> u64 {
    let mut k = 0u32;
    while beta_closed(n, k + 1) <= *m {
        k += 1;
    }
    u64::from(k) % n
}

/// Membership in `S(N)` for a value known only through exact comparisons
/// with rationals and its floor.
fn oracle_excluded(n: u64, m: &BigInt, scaled_frac_floor: &BigInt) -> bool {
    let j = residue_by_scan(n, &m.abs());
    *scaled_frac_floor == BigInt::from(j)
}

pub fn oracle_contains(n: u64, x: &Rational) -> bool {
    let m = x.floor().to_integer();
    let frac = x - Rational::from_integer(m.clone());
    let slot = (frac * qi(n as i64)).floor().to_integer();
    !oracle_excluded(n, &m, &slot)
}

pub fn oracle_contains_quadratic(n: u64, x: &QuadraticNumber) -> bool {
    let m = x.floor();
    let nq = QuadraticNumber::from_rational(qi(n as i64));
    let frac = x.clone() - QuadraticNumber::from_rational(Rational::from_integer(m.clone()));
    let slot = (frac * nq).floor();
    !oracle_excluded(n, &m, &slot)
}

/// Rational with denominator in `1..=max_den` drawn from `[lo, hi]`.
pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo * den..=hi * den);
    q(num, den)
}

pub fn random_positive_rational<R: Rng>(rng: &mut R, hi: i64, max_den: i64) -> Rational {
    loop {
        let r = random_rational(rng, 0, hi, max_den);
        if r.is_positive() {
            return r;
        }
    }
}

pub fn random_point_in_s<R: Rng>(rng: &mut R, n: u64, lo: i64, hi: i64, max_den: i64) -> Rational {
    loop {
        let x = random_rational(rng, lo, hi, max_den);
        if oracle_contains(n, &x) {
            return x;
        }
    }
}

/// Terms of `x0 + Δℕ` with `0 ≤ term < a`, by walking the progression.
pub fn count_by_enumeration(x0: &Rational, delta: &Rational, a: &Rational) -> BigInt {
    let mut count = BigInt::zero();
    let mut t = x0.clone();
    while t < *a {
        if !t.is_negative() {
            count += BigInt::one();
        }
        t += delta;
    }
    count
}

/// Finite union of half-open intervals with total length `< bound`, spread
/// over `[−spread, spread]`.
pub fn random_small_union<R: Rng>(
    rng: &mut R,
    bound: &Rational,
    spread: i64,
) -> Vec<(Rational, Rational)> {
    let pieces = rng.gen_range(0..6);
    let mut out = Vec::new();
    let mut budget = bound.clone();
    for _ in 0..pieces {
        let len = budget.clone() * q(rng.gen_range(1..=9), 20);
        budget -= &len;
        let lo = random_rational(rng, -spread, spread, 12);
        out.push((lo.clone(), lo + len));
    }
    out
}
