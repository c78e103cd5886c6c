//! Two-group inference on asymmetry scores and features.

pub mod mannwhitney;
pub mod student_t;
pub mod ttest;
pub mod uit;

pub use mannwhitney::mann_whitney_u;
pub use student_t::survival as t_survival;
pub use ttest::{pooled_t_test, welch_t_test, Sidedness, TestMethod, TestResult};
pub use uit::{
    bootstrap_critical, bootstrap_critical_with, feature_t_stats, uit_max, FeatureTStats,
    Resampling, UitResult,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::TwoGroupDataset;
use crate::scores::ScoreSpec;

/// Which test to run on a composite score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestChoice {
    PooledT,
    WelchT,
    MannWhitney,
}

impl std::fmt::Display for TestChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestChoice::PooledT => "pooled-t",
            TestChoice::WelchT => "welch-t",
            TestChoice::MannWhitney => "mann-whitney",
        })
    }
}

/// Star shorthand next to p-values: strictly below 0.05, 0.01, 0.001 earn
/// one, two, three stars. Applied to the unrounded p-value.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// One score/test combination in a comparison report.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub score: String,
    /// The method that actually ran, e.g. "mann-whitney-exact".
    pub method: TestMethod,
    pub sidedness: Sidedness,
    pub group1: String,
    pub group2: String,
    pub n1: usize,
    pub n2: usize,
    pub group1_mean: f64,
    pub group1_sd: f64,
    pub group2_mean: f64,
    pub group2_sd: f64,
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_value: f64,
    pub stars: String,
}

fn summary(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

/// Scores both groups under each spec and runs each requested test,
/// producing one row per (score, test) combination in input order.
pub fn run_comparison(
    dataset: &TwoGroupDataset,
    labels: (&str, &str),
    specs: &[ScoreSpec],
    tests: &[TestChoice],
    sidedness: Sidedness,
) -> Result<Vec<ComparisonRow>> {
    if specs.is_empty() {
        return Err(Error::EmptyInput {
            what: "score specifications",
        });
    }
    if tests.is_empty() {
        return Err(Error::EmptyInput { what: "test list" });
    }
    if dataset.n1() < 2 || dataset.n2() < 2 {
        return Err(Error::SampleTooSmall {
            needed: 2,
            got: dataset.n1().min(dataset.n2()),
        });
    }
    let mut rows = Vec::with_capacity(specs.len() * tests.len());
    for spec in specs {
        let u1: Vec<f64> = dataset
            .group1()
            .iter()
            .map(|fv| spec.evaluate(fv))
            .collect::<Result<_>>()?;
        let u2: Vec<f64> = dataset
            .group2()
            .iter()
            .map(|fv| spec.evaluate(fv))
            .collect::<Result<_>>()?;
        let (m1, sd1) = summary(&u1);
        let (m2, sd2) = summary(&u2);
        for &test in tests {
            let result = match test {
                TestChoice::PooledT => pooled_t_test(&u1, &u2, sidedness)?,
                TestChoice::WelchT => welch_t_test(&u1, &u2, sidedness)?,
                TestChoice::MannWhitney => mann_whitney_u(&u1, &u2, sidedness)?,
            };
            rows.push(ComparisonRow {
                score: spec.label.clone(),
                method: result.method,
                sidedness,
                group1: labels.0.to_string(),
                group2: labels.1.to_string(),
                n1: u1.len(),
                n2: u2.len(),
                group1_mean: m1,
                group1_sd: sd1,
                group2_mean: m2,
                group2_sd: sd2,
                statistic: result.statistic,
                df: result.df,
                p_value: result.p_value,
                stars: significance_stars(result.p_value).to_string(),
            });
        }
    }
    Ok(rows)
}
