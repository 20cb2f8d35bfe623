use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StatsError;

pub const DEFAULT_RESAMPLES: usize = 5000;
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Median,
}

impl Statistic {
    pub fn of(self, values: &[f64]) -> f64 {
        match self {
            Statistic::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Statistic::Median => {
                let mut v = values.to_vec();
                v.sort_by(f64::total_cmp);
                let mid = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[mid]
                } else {
                    (v[mid - 1] + v[mid]) / 2.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub statistic: Statistic,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub resamples: usize,
    pub level: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap interval. One seed is drawn from `rng`; resample k
/// uses stream k of that seed, so results do not depend on thread count.
pub fn bootstrap_ci<R: Rng + ?Sized>(
    values: &[f64],
    statistic: Statistic,
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<BootstrapCi, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooSmall(values.len()));
    }
    if resamples == 0 || !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidConfig(format!(
            "resamples {resamples}, level {level}"
        )));
    }
    let seed: u64 = rng.random();
    let n = values.len();
    let mut stats: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, k| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(k as u64);
                buf.clear();
                buf.extend((0..n).map(|_| values[r.random_range(0..n)]));
                statistic.of(buf)
            },
        )
        .collect();
    stats.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapCi {
        statistic,
        estimate: statistic.of(values),
        lo: quantile(&stats, tail),
        hi: quantile(&stats, 1.0 - tail),
        resamples,
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ci = bootstrap_ci(&[2.5; 3], Statistic::Mean, 500, 0.95, &mut rng).unwrap();
        assert_eq!((ci.lo, ci.hi), (2.5, 2.5));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(Statistic::Median.of(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(Statistic::Median.of(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn seeded_runs_repeat() {
        let v: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let a = bootstrap_ci(
            &v,
            Statistic::Median,
            300,
            0.9,
            &mut ChaCha8Rng::seed_from_u64(4),
        );
        let b = bootstrap_ci(
            &v,
            Statistic::Median,
            300,
            0.9,
            &mut ChaCha8Rng::seed_from_u64(4),
        );
        assert_eq!(a, b);
        let ci = a.unwrap();
        assert!(ci.lo <= ci.estimate && ci.estimate <= ci.hi);
    }

    #[test]
    fn rejects_bad_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            bootstrap_ci(&[1.0], Statistic::Mean, 10, 0.95, &mut rng),
            Err(StatsError::TooSmall(1))
        );
        assert!(bootstrap_ci(&[1.0, 2.0], Statistic::Mean, 10, 1.0, &mut rng).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[0.0, 10.0], 0.25), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 1.0), 3.0);
    }
}
