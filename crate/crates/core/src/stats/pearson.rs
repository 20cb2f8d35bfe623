use statrs::distribution::{ContinuousCDF, StudentsT};

use super::hypothesis::{tidy_p, TestKind, TestReport};
use super::StatsError;

/// Product-moment correlation with a two-sided t test on n − 2 degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<TestReport, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::DegenerateSample("fewer than 3 pairs".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(StatsError::DegenerateSample("zero variance".into()));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let (t, p) = if r.abs() == 1.0 {
        (f64::INFINITY.copysign(r), 0.0)
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
        (t, 2.0 * dist.sf(t.abs()))
    };
    Ok(TestReport {
        test: TestKind::Pearson,
        statistic: t,
        p_value: tidy_p(p),
        n,
        r: Some(r),
        n_nonzero: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.37 - 1.0).collect();
        let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &up).unwrap().r.unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &down).unwrap().r.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_value() {
        // r = 0.8 with n = 5 gives t = 2.3094, two-sided p = 0.1041
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0];
        let r = pearson(&x, &y).unwrap();
        assert!((r.r.unwrap() - 0.8).abs() < 1e-12);
        assert!((r.statistic - 2.309_401_076_758_503).abs() < 1e-9);
        assert!((r.p_value - 0.104_088_039_045_757_5).abs() < 1e-6);
    }

    #[test]
    fn degenerate() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::DegenerateSample(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::DegenerateSample(_))
        ));
        assert_eq!(pearson(&[1.0], &[]), Err(StatsError::LengthMismatch(1, 0)));
    }
}
