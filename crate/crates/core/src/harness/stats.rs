//! Paired t-tests and the Friedman rank test used to compare policies.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Outcome of comparing a first sample against a second one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    FirstSmaller,
    Indistinct,
    FirstGreater,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub decision: Comparison,
    /// `mean(d) / (sd(d) / sqrt(n))`; infinite when the differences have
    /// zero variance but a nonzero mean.
    pub t: f64,
    pub p_value: f64,
}

/// Two-sided paired t-test on `d = a - b` with `n - 1` degrees of freedom.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument(
            "a paired t-test needs at least two pairs".into(),
        ));
    }
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);

    if var == 0.0 {
        // Degenerate: every difference equals the mean.
        return Ok(if mean == 0.0 {
            TTest {
                decision: Comparison::Indistinct,
                t: 0.0,
                p_value: 1.0,
            }
        } else {
            let decision = if mean < 0.0 {
                Comparison::FirstSmaller
            } else {
                Comparison::FirstGreater
            };
            TTest {
                decision,
                t: mean.signum() * f64::INFINITY,
                p_value: 0.0,
            }
        });
    }

    let t = mean / (var.sqrt() / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::InvalidArgument(format!("t distribution: {e}")))?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    let decision = if p_value >= alpha {
        Comparison::Indistinct
    } else if t < 0.0 {
        Comparison::FirstSmaller
    } else {
        Comparison::FirstGreater
    };
    Ok(TTest {
        decision,
        t,
        p_value,
    })
}

/// Counts of `<`, `≈` and `>` outcomes over a set of test cases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub smaller: usize,
    pub indistinct: usize,
    pub greater: usize,
}

impl Tally {
    pub fn total(&self) -> usize {
        self.smaller + self.indistinct + self.greater
    }
}

impl FromIterator<Comparison> for Tally {
    fn from_iter<I: IntoIterator<Item = Comparison>>(iter: I) -> Self {
        let mut t = Tally::default();
        for c in iter {
            match c {
                Comparison::FirstSmaller => t.smaller += 1,
                Comparison::Indistinct => t.indistinct += 1,
                Comparison::FirstGreater => t.greater += 1,
            }
        }
        t
    }
}

/// Rendered as `smaller/indistinct/greater`.
impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.smaller, self.indistinct, self.greater)
    }
}

/// Ranks in ascending order starting at 1; ties share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share ranks i+1..=j.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Friedman {
    pub statistic: f64,
    pub p_value: f64,
    /// Mean rank per algorithm; lower is better.
    pub mean_ranks: Vec<f64>,
}

/// Friedman test over an `algorithms x problems` matrix of results
/// (smaller is better). Uses the chi-square approximation with `k - 1`
/// degrees of freedom and no tie correction.
pub fn friedman_test(results: &[Vec<f64>]) -> Result<Friedman> {
    let k = results.len();
    if k < 2 {
        return Err(Error::InvalidArgument(
            "Friedman test needs at least two algorithms".into(),
        ));
    }
    let n = results[0].len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "Friedman test needs at least two problems".into(),
        ));
    }
    if results.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("ragged result matrix".into()));
    }

    let mut rank_sums = vec![0.0; k];
    for p in 0..n {
        let column: Vec<f64> = results.iter().map(|r| r[p]).collect();
        for (sum, r) in rank_sums.iter_mut().zip(average_ranks(&column)) {
            *sum += r;
        }
    }
    let (kf, nf) = (k as f64, n as f64);
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let statistic = (12.0 * nf / (kf * (kf + 1.0)) * (sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    let dist = ChiSquared::new(kf - 1.0)
        .map_err(|e| Error::InvalidArgument(format!("chi-square distribution: {e}")))?;
    Ok(Friedman {
        statistic,
        p_value: dist.sf(statistic),
        mean_ranks,
    })
}

/// Sample mean and standard deviation (`n - 1` denominator; 0 for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_test_identical_samples() {
        let a = [1.0, 2.0, 3.0];
        let r = paired_t_test(&a, &a, 0.05).unwrap();
        assert_eq!(r.decision, Comparison::Indistinct);
        assert_eq!(r.t, 0.0);
    }

    #[test]
    fn t_test_constant_shift() {
        let r = paired_t_test(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0], 0.05).unwrap();
        assert_eq!(r.decision, Comparison::FirstGreater);
        assert_eq!(r.t, f64::INFINITY);
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0], 0.05).unwrap();
        assert_eq!(r.decision, Comparison::FirstSmaller);
    }

    #[test]
    fn t_test_hand_value() {
        // d = [-1, -1, 6]: mean 4/3, sd sqrt(49/3), t = 4/7.
        let r = paired_t_test(&[1.0, 2.0, 10.0], &[2.0, 3.0, 4.0], 0.05).unwrap();
        assert!((r.t - 4.0 / 7.0).abs() < 1e-12);
        assert_eq!(r.decision, Comparison::Indistinct);
        // Two-sided Student t tail at t = 4/7, 2 dof, from tables.
        assert!((r.p_value - 0.625_365_675_367_322_5).abs() < 1e-8);
    }

    #[test]
    fn t_test_rejects_bad_shapes() {
        assert!(paired_t_test(&[1.0, 2.0], &[1.0], 0.05).is_err());
        assert!(paired_t_test(&[1.0], &[1.0], 0.05).is_err());
    }

    #[test]
    fn tally_format() {
        let t: Tally = [
            Comparison::FirstSmaller,
            Comparison::Indistinct,
            Comparison::FirstSmaller,
        ]
        .into_iter()
        .collect();
        assert_eq!(t.to_string(), "2/1/0");
        assert_eq!(t.total(), 3);
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(
            average_ranks(&[1.0, 1.0, 2.0, 0.0]),
            vec![2.5, 2.5, 4.0, 1.0]
        );
    }

    #[test]
    fn friedman_identical_algorithms() {
        let row = vec![1.0, 5.0, 3.0];
        let f = friedman_test(&[row.clone(), row.clone(), row]).unwrap();
        assert_eq!(f.statistic, 0.0);
        assert!(f.mean_ranks.iter().all(|&r| r == 2.0));
        assert!((f.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn friedman_dominance() {
        let f = friedman_test(&[vec![1.0; 10], vec![2.0; 10]]).unwrap();
        assert_eq!(f.mean_ranks, vec![1.0, 2.0]);
        assert!((f.statistic - 10.0).abs() < 1e-12);
        // Chi-square upper tail at 10 with 1 dof, from tables.
        assert!((f.p_value - 0.001_565_402_258_002_549).abs() < 1e-8);
    }

    #[test]
    fn friedman_three_way() {
        let f = friedman_test(&[
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 3.0, 1.0, 5.0],
            vec![3.0, 1.0, 2.0, 6.0],
        ])
        .unwrap();
        assert!((f.statistic - 0.5).abs() < 1e-12);
        assert!((f.p_value - 0.778_800_783_071_404_9).abs() < 1e-8);
    }

    #[test]
    fn friedman_rejects_degenerate_shapes() {
        assert!(friedman_test(&[vec![1.0, 2.0]]).is_err());
        assert!(friedman_test(&[vec![1.0], vec![2.0]]).is_err());
        assert!(friedman_test(&[vec![1.0, 2.0], vec![2.0]]).is_err());
    }

    #[test]
    fn mean_std_single_value() {
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
    }
}
