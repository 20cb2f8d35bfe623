use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_ci, BootstrapCi, Statistic, DEFAULT_LEVEL, DEFAULT_RESAMPLES};
use super::corpus::Corpus;
use super::hypothesis::TestReport;
use super::pearson::pearson;
use super::wilcoxon::wilcoxon_signed_rank;
use super::StatsError;

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub bins: usize,
    pub resamples: usize,
    pub level: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            resamples: DEFAULT_RESAMPLES,
            level: DEFAULT_LEVEL,
        }
    }
}

/// A computed value or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

impl<T> From<Result<T, StatsError>> for Outcome<T> {
    fn from(r: Result<T, StatsError>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_fitness: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Summary of one residual metric across the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Records with a residual for this metric.
    pub n: usize,
    pub median: Outcome<BootstrapCi>,
    pub wilcoxon: Outcome<TestReport>,
    pub pearson_fitness: Outcome<TestReport>,
    pub bins: Vec<Bin>,
    pub fit: Outcome<LinearFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub n: usize,
    pub config: ReportConfig,
    pub modularity: ResidualReport,
    pub hierarchy: ResidualReport,
}

pub fn corpus_report<R: Rng + ?Sized>(
    corpus: &Corpus,
    cfg: &ReportConfig,
    rng: &mut R,
) -> Result<CorpusReport, StatsError> {
    if corpus.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    if cfg.bins == 0 {
        return Err(StatsError::InvalidConfig("bins must be positive".into()));
    }
    let pairs = |f: fn(&super::CorpusRecord) -> Option<f64>| -> Vec<(f64, f64)> {
        corpus
            .records
            .iter()
            .filter_map(|r| f(r).map(|v| (v, r.fitness as f64)))
            .collect()
    };
    let q = pairs(|r| r.q_residual);
    let h = pairs(|r| r.h_residual);
    Ok(CorpusReport {
        n: corpus.len(),
        config: *cfg,
        modularity: residual_report(&q, cfg, rng),
        hierarchy: residual_report(&h, cfg, rng),
    })
}

fn residual_report<R: Rng + ?Sized>(
    pairs: &[(f64, f64)],
    cfg: &ReportConfig,
    rng: &mut R,
) -> ResidualReport {
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let median = bootstrap_ci(&xs, Statistic::Median, cfg.resamples, cfg.level, rng).into();
    let bins = bin_table(pairs, cfg, rng);
    ResidualReport {
        n: pairs.len(),
        median,
        wilcoxon: wilcoxon_signed_rank(&xs).into(),
        pearson_fitness: pearson(&xs, &ys).into(),
        bins,
        fit: linear_fit(&xs, &ys).into(),
    }
}

/// Equal-width bins over the residual range, each with its mean fitness and
/// a bootstrap interval of that mean.
pub fn bin_table<R: Rng + ?Sized>(
    pairs: &[(f64, f64)],
    cfg: &ReportConfig,
    rng: &mut R,
) -> Vec<Bin> {
    if pairs.is_empty() {
        return Vec::new();
    }
    let lo = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / cfg.bins as f64;
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); cfg.bins];
    for &(x, y) in pairs {
        let k = if width > 0.0 {
            (((x - lo) / width) as usize).min(cfg.bins - 1)
        } else {
            0
        };
        members[k].push(y);
    }
    members
        .into_iter()
        .enumerate()
        .map(|(k, ys)| {
            let ci = bootstrap_ci(&ys, Statistic::Mean, cfg.resamples, cfg.level, rng).ok();
            Bin {
                lo: lo + k as f64 * width,
                hi: if k + 1 == cfg.bins {
                    hi
                } else {
                    lo + (k + 1) as f64 * width
                },
                count: ys.len(),
                mean_fitness: (!ys.is_empty()).then(|| Statistic::Mean.of(&ys)),
                ci_lo: ci.map(|c| c.lo),
                ci_hi: ci.map(|c| c.hi),
            }
        })
        .collect()
}

/// Least-squares line of y on x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooSmall(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateSample("zero variance in x".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
    })
}
