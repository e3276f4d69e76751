//! Empirical equidistribution of `⟨x_n⟩` over the subintervals `Q_0..Q_{N−1}`.
//!
//! This is a diagnostic: the tallies say nothing about convergence beyond the
//! examined range.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escape::Progression;
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistDiagnostics {
    #[serde(rename = "N")]
    pub n: u64,
    /// Largest index examined; `M + 1` terms are tallied.
    #[serde(rename = "M")]
    pub m: u64,
    /// `counts[i]` is the number of `n ≤ M` with `⟨x_n⟩ ∈ Q_i`.
    pub counts: Vec<u64>,
    #[serde(with = "crate::exact_str::rational")]
    pub epsilon: Rational,
    /// Least `L` such that the `Q_0` frequency stays within `epsilon` of `1/N`
    /// for every `L < n ≤ M`; `None` if it is off at `n = M`.
    #[serde(rename = "L")]
    pub settle_index: Option<u64>,
}

impl EquidistDiagnostics {
    pub fn frequency(&self, cell: usize) -> Rational {
        Rational::new(BigInt::from(self.counts[cell]), BigInt::from(self.m) + 1)
    }

    pub fn deviation(&self, cell: usize) -> Rational {
        self.frequency(cell) - Rational::new(1.into(), BigInt::from(self.n))
    }

    pub fn max_abs_deviation(&self) -> Rational {
        (0..self.counts.len())
            .map(|i| self.deviation(i).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// CSV with columns `cell,count,frequency,deviation`, exact values.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv output failed: {e}"));
        writer
            .write_record(["cell", "count", "frequency", "deviation"])
            .map_err(io)?;
        for (i, count) in self.counts.iter().enumerate() {
            writer
                .write_record([
                    i.to_string(),
                    count.to_string(),
                    self.frequency(i).to_string(),
                    self.deviation(i).to_string(),
                ])
                .map_err(io)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::InvalidParameter(format!("csv output failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Tallies the subinterval of `⟨x_n⟩` for `n = 0..=M`.
pub fn equidist_stats(
    n: u64,
    prog: &Progression,
    m: u64,
    epsilon: &Rational,
) -> Result<EquidistDiagnostics> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    if prog.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: prog.dimension(),
        });
    }
    let big_n = BigInt::from(n);
    let mut counts = vec![0u64; usize::try_from(n).expect("N fits in usize")];
    let mut settle_index = Some(0u64);
    for i in 0..=m {
        let term = &prog.term(&BigInt::from(i))[0];
        let cell = term.locate_subinterval(n)?;
        counts[cell as usize] += 1;
        // |c0/(i+1) − 1/N| ≥ ε  ⟺  |N·c0 − (i+1)| ≥ ε·N·(i+1)
        let terms = BigInt::from(i) + 1;
        let gap: BigInt = &big_n * BigInt::from(counts[0]) - &terms;
        let gap = Rational::from_integer(gap.abs());
        if i > 0 && gap >= epsilon * Rational::from_integer(&big_n * &terms) {
            settle_index = if i == m { None } else { Some(i) };
        }
    }
    Ok(EquidistDiagnostics {
        n,
        m,
        counts,
        epsilon: epsilon.clone(),
        settle_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::CertifiedReal;
    use crate::scalar::rational;

    fn prog(x0: &str, delta: &str) -> Progression {
        Progression::one_dim(x0.parse().unwrap(), delta.parse().unwrap()).unwrap()
    }

    #[test]
    fn rational_gap_is_periodic() {
        let d = equidist_stats(3, &prog("1/2", "1"), 50, &rational(1, 100)).unwrap();
        assert_eq!(d.counts, vec![0, 51, 0]);
        assert_eq!(d.settle_index, None);
    }

    #[test]
    fn single_term() {
        let d = equidist_stats(3, &prog("5/6", "sqrt(2)"), 0, &rational(1, 100)).unwrap();
        assert_eq!(d.counts, vec![0, 0, 1]);
        assert_eq!(d.counts.iter().sum::<u64>(), 1);
        assert_eq!(d.settle_index, Some(0));
    }

    #[test]
    fn counts_sum_and_csv() {
        let d = equidist_stats(4, &prog("0", "sqrt(3)"), 999, &rational(1, 10)).unwrap();
        assert_eq!(d.counts.iter().sum::<u64>(), 1000);
        let csv = d.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "cell,count,frequency,deviation");
        assert_eq!(lines.len(), 5);
        let sum: Rational = (0..4).map(|i| d.deviation(i)).sum();
        assert_eq!(sum, rational(0, 1));
    }

    #[test]
    fn settle_index_brute_force() {
        let p = prog("1/7", "(1+sqrt(5))/2");
        let eps = rational(1, 20);
        let d = equidist_stats(3, &p, 300, &eps).unwrap();
        // Recompute the running Q_0 frequency directly.
        let mut c0 = 0u64;
        let mut last_bad = None;
        for i in 0..=300u64 {
            let t: &CertifiedReal = &p.term(&BigInt::from(i))[0];
            let f = t.frac(&rational(1, 1 << 30)).unwrap();
            if f.cmp_rational(&rational(1, 3)).unwrap().is_lt() {
                c0 += 1;
            }
            let dev = (Rational::new(c0.into(), (i + 1).into()) - rational(1, 3)).abs();
            if i > 0 && dev >= eps {
                last_bad = Some(i);
            }
        }
        let expected = match last_bad {
            None => Some(0),
            Some(300) => None,
            Some(i) => Some(i),
        };
        assert_eq!(d.settle_index, expected);
        assert_eq!(d.counts[0], c0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(equidist_stats(0, &prog("0", "1"), 5, &rational(1, 2)).is_err());
        assert!(equidist_stats(3, &prog("0", "1"), 5, &rational(0, 1)).is_err());
    }
}
