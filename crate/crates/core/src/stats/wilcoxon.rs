use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::hypothesis::{tidy_p, TestKind, TestReport};
use super::StatsError;

/// Largest non-zero sample size handled by exact enumeration under `Auto`.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    #[default]
    Auto,
    Exact,
    Normal,
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// One-sample two-sided signed-rank test of symmetry about zero.
pub fn wilcoxon_signed_rank(values: &[f64]) -> Result<TestReport, StatsError> {
    wilcoxon_with(values, WilcoxonMethod::Auto)
}

pub fn wilcoxon_with(values: &[f64], method: WilcoxonMethod) -> Result<TestReport, StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let nonzero: Vec<f64> = values.iter().copied().filter(|&v| v != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Err(StatsError::AllZeros);
    }
    let abs: Vec<f64> = nonzero.iter().map(|v| v.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = ranks
        .iter()
        .zip(&nonzero)
        .filter(|(_, v)| **v > 0.0)
        .map(|(r, _)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w = w_plus.min(total - w_plus);
    let exact = match method {
        WilcoxonMethod::Auto => n <= EXACT_MAX_N,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Normal => false,
    };
    let p = if exact {
        exact_p(&ranks, w)
    } else {
        normal_p(&abs, &ranks, w)
    };
    Ok(TestReport {
        test: TestKind::Wilcoxon,
        statistic: w,
        p_value: tidy_p(p),
        n: values.len(),
        r: None,
        n_nonzero: Some(n),
    })
}

/// 2·P(T ≤ w) under the sign-flip null, counting on doubled ranks so that
/// average ranks stay integral.
fn exact_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &d in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + d] += counts[s];
            }
        }
        reach += d;
    }
    let limit = (2.0 * w).round() as usize;
    let below: f64 = counts[..=limit.min(max)].iter().sum();
    2.0 * below / 2f64.powi(ranks.len() as i32)
}

/// Normal approximation with tie and continuity correction.
fn normal_p(abs: &[f64], ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let diff = w - mean;
    let corrected = if diff < 0.0 {
        (diff + 0.5).min(0.0)
    } else {
        0.0
    };
    let z = corrected / var.sqrt();
    2.0 * Normal::standard().cdf(z)
}
