//! Two-sample effect size and location tests.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::normality::shapiro_wilk;
use super::special::{normal_sf, student_t_two_sided};
use super::{mean, sample_variance};
use crate::error::{Error, Result};

pub const NORMALITY_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    WelchT,
    MannWhitneyU,
}

impl core::fmt::Display for TestKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            TestKind::WelchT => "welch-t",
            TestKind::MannWhitneyU => "mann-whitney-u",
        })
    }
}

fn require_two(a: &[f64], b: &[f64]) -> Result<()> {
    require_at_least(2, a, b)
}

fn require_at_least(n: usize, a: &[f64], b: &[f64]) -> Result<()> {
    for s in [a, b] {
        if s.len() < n {
            return Err(Error::InsufficientFrames { required: n, available: s.len() });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSample("non-finite value"));
        }
    }
    Ok(())
}

/// `(mean(a) - mean(b)) / s_pooled` with the Bessel-corrected pooled sd.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    require_two(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if !(pooled > 0.0) {
        return Err(Error::DegenerateSample("pooled variance is zero"));
    }
    Ok((mean(a) - mean(b)) / libm::sqrt(pooled))
}

/// Welch's unequal-variance t test, two-sided.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TestResult> {
    require_two(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = va + vb;
    if !(se2 > 0.0) {
        return Err(Error::DegenerateSample("both groups have zero variance"));
    }
    let t = (mean(a) - mean(b)) / libm::sqrt(se2);
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TestResult { statistic: t, p_value: student_t_two_sided(t, df) })
}

/// Midranks (1-based) of the pooled sample and the tie term Σ(t³ - t).
fn pooled_ranks(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut pooled: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = alloc::vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for item in &pooled[i..j] {
            ranks[item.1] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Mann–Whitney U. The statistic is U for `a` (pairs where `a` wins, ties
/// counting one half); the p-value is the two-sided normal approximation with
/// tie and continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    require_at_least(1, a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ranks, ties) = pooled_ranks(a, b);
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum_a - na * (na + 1.0) / 2.0;
    let n = na + nb;
    let mu = na * nb / 2.0;
    let sigma = libm::sqrt(na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0))));
    let p_value = if sigma > 0.0 {
        let z = ((u - mu).abs() - 0.5) / sigma;
        (2.0 * normal_sf(z)).min(1.0)
    } else {
        1.0
    };
    Ok(TestResult { statistic: u, p_value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestChoice {
    pub test: TestKind,
    pub normality_p: [Option<f64>; 2],
    pub warning: Option<String>,
}

/// Welch when Shapiro–Wilk does not reject normality (α = 0.05) in either
/// group, Mann–Whitney otherwise. Groups under three values, or with no
/// spread, fall back to Mann–Whitney with a warning.
pub fn choose_test(a: &[f64], b: &[f64]) -> TestChoice {
    let mut normality_p = [None, None];
    let mut warning = None;
    let mut normal = true;
    for (i, s) in [a, b].into_iter().enumerate() {
        match shapiro_wilk(s) {
            Ok(r) => {
                normality_p[i] = Some(r.p_value);
                normal &= r.p_value > NORMALITY_ALPHA;
            }
            Err(e) => {
                normal = false;
                warning.get_or_insert_with(|| alloc::format!("normality test unavailable ({e}); using mann-whitney-u"));
            }
        }
    }
    let test = if normal { TestKind::WelchT } else { TestKind::MannWhitneyU };
    TestChoice { test, normality_p, warning }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_d() {
        let d = cohens_d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((d + 1.0).abs() < 1e-12);
        assert_eq!(cohens_d(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert!(cohens_d(&[5.0, 5.0, 5.0], &[5.0, 5.0, 5.0]).is_err());
    }

    #[test]
    fn u_for_separated_pairs() {
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        let r = mann_whitney_u(&[3.0, 4.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.statistic, 4.0);
    }

    #[test]
    fn welch_identical_groups() {
        let a = [1.0, 4.0, 2.0, 8.0];
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(welch_t(&[2.0, 2.0], &[3.0, 3.0]).is_err());
    }

    #[test]
    fn translation_leaves_tests_unchanged() {
        let a = [1.2, 3.4, 2.2, 5.0, 4.1];
        let b = [2.0, 6.5, 4.4, 7.1];
        let shift = |s: &[f64]| s.iter().map(|v| v + 100.0).collect::<Vec<_>>();
        let (w0, w1) = (welch_t(&a, &b).unwrap(), welch_t(&shift(&a), &shift(&b)).unwrap());
        assert!((w0.statistic - w1.statistic).abs() < 1e-9 && (w0.p_value - w1.p_value).abs() < 1e-9);
        assert_eq!(mann_whitney_u(&a, &b).unwrap(), mann_whitney_u(&shift(&a), &shift(&b)).unwrap());
    }

    #[test]
    fn tiny_groups_fall_back_with_warning() {
        let c = choose_test(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(c.test, TestKind::MannWhitneyU);
        assert!(c.warning.is_some());
    }

    #[test]
    fn midranks() {
        let (ranks, ties) = pooled_ranks(&[1.0, 2.0, 2.0], &[2.0, 5.0]);
        assert_eq!(ranks, alloc::vec![1.0, 3.0, 3.0, 3.0, 5.0]);
        assert_eq!(ties, 24.0);
    }
}
