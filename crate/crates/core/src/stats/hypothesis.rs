use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Wilcoxon,
    Pearson,
}

/// Outcome of a two-sided hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: TestKind,
    /// W = min(W⁺, W⁻) for Wilcoxon, t for Pearson.
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_nonzero: Option<usize>,
}

/// Clamps to [0, 1] and reports an underflowed p as the smallest positive f64.
pub(crate) fn tidy_p(p: f64) -> f64 {
    if p.is_nan() {
        return 1.0;
    }
    let p = p.min(1.0);
    if p <= 0.0 {
        f64::from_bits(1)
    } else {
        p
    }
}
