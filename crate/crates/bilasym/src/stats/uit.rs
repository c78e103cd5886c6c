//! Union-intersection feature selection.
//!
//! Each feature gets a two-sample t statistic oriented group 2 minus
//! group 1; the test statistic is their maximum V. The null distribution
//! of V is calibrated by resampling the pooled subjects (bootstrap by
//! default, permutation on request), and every feature whose statistic
//! exceeds the critical value is selected, with simultaneous lower
//! confidence bounds on the mean differences as a byproduct.
//!
//! Determinism: replicate b draws from an independent counter-based RNG
//! stream derived from (seed, b), and replicate results are collected
//! positionally, so the outcome is identical across runs and worker
//! counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{FeatureKind, TwoGroupDataset};

/// Fewer replicates than this make the upper quantile too ragged to use.
const MIN_REPLICATES: usize = 1000;
/// Pooled variances below this are treated as exactly zero.
const VAR_FLOOR: f64 = 1e-300;

/// Per-feature t statistics and the pieces needed to build bounds.
#[derive(Debug, Clone)]
pub struct FeatureTStats {
    /// Oriented statistics v_j; exactly 0.0 for zero-variance features.
    pub v: Vec<f64>,
    /// Mean differences, group 2 minus group 1.
    pub diffs: Vec<f64>,
    /// Standard errors s_j sqrt(1/N1 + 1/N2); 0.0 where variance is zero.
    pub se: Vec<f64>,
    /// Features whose pooled variance vanished (0-based positions).
    pub zero_variance: Vec<usize>,
}

/// Computes the per-feature statistics. Requires magnitude features
/// (absolute or landmark-level) and at least two subjects per group.
pub fn feature_t_stats(dataset: &TwoGroupDataset) -> Result<FeatureTStats> {
    if dataset.kind() == FeatureKind::Signed {
        return Err(Error::KindMismatch {
            expected: "magnitude features (absolute or landmark-level)",
            actual: dataset.kind().to_string(),
        });
    }
    let (n1, n2) = (dataset.n1(), dataset.n2());
    if n1 < 2 || n2 < 2 {
        return Err(Error::SampleTooSmall {
            needed: 2,
            got: n1.min(n2),
        });
    }
    let j_count = dataset.feature_count();
    let factor = (1.0 / n1 as f64 + 1.0 / n2 as f64).sqrt();
    let df = (n1 + n2 - 2) as f64;

    let mut v = Vec::with_capacity(j_count);
    let mut diffs = Vec::with_capacity(j_count);
    let mut se = Vec::with_capacity(j_count);
    let mut zero_variance = Vec::new();
    for j in 0..j_count {
        let c1 = dataset.feature_column(1, j);
        let c2 = dataset.feature_column(2, j);
        let m1 = c1.iter().sum::<f64>() / n1 as f64;
        let m2 = c2.iter().sum::<f64>() / n2 as f64;
        let ss: f64 = c1.iter().map(|x| (x - m1) * (x - m1)).sum::<f64>()
            + c2.iter().map(|x| (x - m2) * (x - m2)).sum::<f64>();
        let pooled_var = ss / df;
        diffs.push(m2 - m1);
        if pooled_var < VAR_FLOOR {
            v.push(0.0);
            se.push(0.0);
            zero_variance.push(j);
        } else {
            let s = pooled_var.sqrt() * factor;
            se.push(s);
            v.push((m2 - m1) / s);
        }
    }
    Ok(FeatureTStats {
        v,
        diffs,
        se,
        zero_variance,
    })
}

/// max_j v_j.
pub fn uit_max(v: &[f64]) -> Result<f64> {
    v.iter()
        .copied()
        .max_by(f64::total_cmp)
        .ok_or(Error::EmptyInput {
            what: "statistic vector",
        })
}

/// How null replicates are drawn from the pooled subjects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resampling {
    /// Draw N subjects with replacement, first N1 forming group 1.
    PooledBootstrap,
    /// Shuffle the N subjects, first N1 forming group 1.
    Permutation,
}

impl std::fmt::Display for Resampling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Resampling::PooledBootstrap => "pooled-bootstrap",
            Resampling::Permutation => "permutation",
        })
    }
}

/// Everything the selection produced.
#[derive(Debug, Clone)]
pub struct UitResult {
    /// Observed per-feature statistics.
    pub v: Vec<f64>,
    /// Observed maximum V.
    pub max_stat: f64,
    /// Calibrated critical value at level alpha.
    pub critical_value: f64,
    /// 0-based positions with v_j strictly above the critical value;
    /// exactly the positions with a positive lower bound.
    pub selected: Vec<usize>,
    /// Simultaneous lower confidence bounds on the mean differences;
    /// 0.0 for zero-variance features.
    pub lower_bounds: Vec<f64>,
    /// Features flagged as zero-variance, never selected.
    pub zero_variance: Vec<usize>,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    pub resampling: Resampling,
}

/// Bootstrap-calibrated selection with the default pooled resampling.
pub fn bootstrap_critical(
    dataset: &TwoGroupDataset,
    replicates: usize,
    alpha: f64,
    seed: u64,
) -> Result<UitResult> {
    bootstrap_critical_with(dataset, replicates, alpha, seed, Resampling::PooledBootstrap)
}

/// Bootstrap-calibrated selection with an explicit resampling scheme.
pub fn bootstrap_critical_with(
    dataset: &TwoGroupDataset,
    replicates: usize,
    alpha: f64,
    seed: u64,
    resampling: Resampling,
) -> Result<UitResult> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InsufficientReplicates {
            given: replicates,
            minimum: MIN_REPLICATES,
        });
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidAlpha { alpha });
    }
    let observed = feature_t_stats(dataset)?;
    let max_stat = uit_max(&observed.v)?;

    let n1 = dataset.n1();
    let n = n1 + dataset.n2();
    let j_count = dataset.feature_count();
    let pooled: Vec<Vec<f64>> = dataset
        .group1()
        .iter()
        .chain(dataset.group2().iter())
        .map(|fv| fv.values().to_vec())
        .collect();

    let mut maxima: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            let indices: Vec<usize> = match resampling {
                Resampling::PooledBootstrap => (0..n).map(|_| rng.gen_range(0..n)).collect(),
                Resampling::Permutation => {
                    let mut idx: Vec<usize> = (0..n).collect();
                    // Fisher-Yates, driven by the replicate's own stream
                    for i in (1..n).rev() {
                        let j = rng.gen_range(0..=i);
                        idx.swap(i, j);
                    }
                    idx
                }
            };
            replicate_max(&pooled, &indices, n1, j_count)
        })
        .collect();

    maxima.sort_by(f64::total_cmp);
    let rank = ((1.0 - alpha) * replicates as f64).ceil() as usize;
    let critical_value = maxima[rank.clamp(1, replicates) - 1];

    let mut selected = Vec::new();
    let mut lower_bounds = Vec::with_capacity(j_count);
    for j in 0..j_count {
        if observed.se[j] == 0.0 {
            lower_bounds.push(0.0);
            continue;
        }
        lower_bounds.push(observed.diffs[j] - critical_value * observed.se[j]);
        if observed.v[j] > critical_value {
            selected.push(j);
        }
    }
    Ok(UitResult {
        v: observed.v,
        max_stat,
        critical_value,
        selected,
        lower_bounds,
        zero_variance: observed.zero_variance,
        alpha,
        replicates,
        seed,
        resampling,
    })
}

/// Max per-feature t statistic for one resampled assignment.
fn replicate_max(pooled: &[Vec<f64>], indices: &[usize], n1: usize, j_count: usize) -> f64 {
    let n = indices.len();
    let n2 = n - n1;
    let df = (n - 2) as f64;
    let factor = (1.0 / n1 as f64 + 1.0 / n2 as f64).sqrt();
    let mut s1 = vec![0.0; j_count];
    let mut q1 = vec![0.0; j_count];
    let mut s2 = vec![0.0; j_count];
    let mut q2 = vec![0.0; j_count];
    for (pos, &i) in indices.iter().enumerate() {
        let row = &pooled[i];
        let (s, q) = if pos < n1 {
            (&mut s1, &mut q1)
        } else {
            (&mut s2, &mut q2)
        };
        for j in 0..j_count {
            s[j] += row[j];
            q[j] += row[j] * row[j];
        }
    }
    let mut best = f64::NEG_INFINITY;
    for j in 0..j_count {
        let m1 = s1[j] / n1 as f64;
        let m2 = s2[j] / n2 as f64;
        let ss = (q1[j] - n1 as f64 * m1 * m1).max(0.0) + (q2[j] - n2 as f64 * m2 * m2).max(0.0);
        let pooled_var = ss / df;
        let v = if pooled_var < VAR_FLOOR {
            0.0
        } else {
            (m2 - m1) / (pooled_var.sqrt() * factor)
        };
        if v > best {
            best = v;
        }
    }
    best
}
