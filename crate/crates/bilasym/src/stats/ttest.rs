//! Two-sample t tests on scalar asymmetry scores.
//!
//! Group 2 is the group hypothesized to be MORE asymmetric, so the
//! statistics are oriented as group 2 minus group 1 and the one-sided
//! alternative is "greater".

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::student_t::survival;

/// Alternative hypothesis direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sidedness {
    /// H1: group 2 exceeds group 1.
    #[serde(rename = "one-sided-greater")]
    OneSidedGreater,
    #[serde(rename = "two-sided")]
    TwoSided,
}

impl std::fmt::Display for Sidedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sidedness::OneSidedGreater => "one-sided-greater",
            Sidedness::TwoSided => "two-sided",
        })
    }
}

/// The procedure that actually produced a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestMethod {
    #[serde(rename = "pooled-t")]
    PooledT,
    #[serde(rename = "welch-t")]
    WelchT,
    #[serde(rename = "mann-whitney-exact")]
    MannWhitneyExact,
    #[serde(rename = "mann-whitney-approx")]
    MannWhitneyApprox,
}

impl std::fmt::Display for TestMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestMethod::PooledT => "pooled-t",
            TestMethod::WelchT => "welch-t",
            TestMethod::MannWhitneyExact => "mann-whitney-exact",
            TestMethod::MannWhitneyApprox => "mann-whitney-approx",
        })
    }
}

/// Outcome of a two-sample test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    /// t statistic, or the rank-sum count U for the rank test.
    pub statistic: f64,
    /// Degrees of freedom where the method has them.
    pub df: Option<f64>,
    pub p_value: f64,
    pub sidedness: Sidedness,
    pub method: TestMethod,
}

fn check_samples(u1: &[f64], u2: &[f64], needed: usize) -> Result<()> {
    let got = u1.len().min(u2.len());
    if got < needed {
        return Err(Error::SampleTooSmall { needed, got });
    }
    if u1.iter().chain(u2.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "sample" });
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

fn p_from_t(t: f64, df: f64, sidedness: Sidedness) -> f64 {
    match sidedness {
        Sidedness::OneSidedGreater => survival(t, df),
        Sidedness::TwoSided => 2.0 * survival(t.abs(), df),
    }
}

/// Two-sample t test with a pooled variance estimate, df = N - 2.
pub fn pooled_t_test(u1: &[f64], u2: &[f64], sidedness: Sidedness) -> Result<TestResult> {
    check_samples(u1, u2, 2)?;
    let (n1, n2) = (u1.len() as f64, u2.len() as f64);
    let (m1, m2) = (mean(u1), mean(u2));
    let df = n1 + n2 - 2.0;
    let pooled_var = (sum_sq_dev(u1, m1) + sum_sq_dev(u2, m2)) / df;
    if pooled_var < 1e-300 {
        return Err(Error::ZeroVariance);
    }
    let t = (m2 - m1) / (pooled_var.sqrt() * (1.0 / n1 + 1.0 / n2).sqrt());
    Ok(TestResult {
        statistic: t,
        df: Some(df),
        p_value: p_from_t(t, df, sidedness),
        sidedness,
        method: TestMethod::PooledT,
    })
}

/// Welch's t test with the Welch-Satterthwaite degrees of freedom. Fails
/// with a zero-variance error only when both groups are constant.
pub fn welch_t_test(u1: &[f64], u2: &[f64], sidedness: Sidedness) -> Result<TestResult> {
    check_samples(u1, u2, 2)?;
    let (n1, n2) = (u1.len() as f64, u2.len() as f64);
    let (m1, m2) = (mean(u1), mean(u2));
    let v1 = sum_sq_dev(u1, m1) / (n1 - 1.0);
    let v2 = sum_sq_dev(u2, m2) / (n2 - 1.0);
    let se2 = v1 / n1 + v2 / n2;
    if se2 < 1e-300 {
        return Err(Error::ZeroVariance);
    }
    let df = se2 * se2
        / ((v1 / n1) * (v1 / n1) / (n1 - 1.0) + (v2 / n2) * (v2 / n2) / (n2 - 1.0));
    let t = (m2 - m1) / se2.sqrt();
    Ok(TestResult {
        statistic: t,
        df: Some(df),
        p_value: p_from_t(t, df, sidedness),
        sidedness,
        method: TestMethod::WelchT,
    })
}
