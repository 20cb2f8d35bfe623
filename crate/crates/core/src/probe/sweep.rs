use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProbeError;
use crate::cppn::{CompiledCppn, CppnConfig};
use crate::genome::{Genome, Innovation};
use crate::image::ImageBuffer;

pub const DEFAULT_STEP: f64 = 0.1;
pub const FINE_STEP: f64 = 0.01;
pub const DEFAULT_THRESHOLD: f64 = 0.05;
/// Frames this close to the baseline weight count toward the local window.
pub const LOCAL_WINDOW: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub connection: Innovation,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub width: usize,
    pub height: usize,
}

impl SweepSpec {
    /// Full weight range at 0.1 intervals.
    pub fn new(connection: Innovation, width: usize, height: usize) -> Self {
        Self {
            connection,
            lo: -3.0,
            hi: 3.0,
            step: DEFAULT_STEP,
            width,
            height,
        }
    }

    pub fn fine(self) -> Self {
        Self {
            step: FINE_STEP,
            ..self
        }
    }

    pub fn check(&self) -> Result<(), ProbeError> {
        let bad = |msg: &str| Err(ProbeError::InvalidSpec(msg.to_string()));
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return bad("bounds and step must be finite");
        }
        if self.lo >= self.hi {
            return bad("lo must be below hi");
        }
        if self.step <= 0.0 {
            return bad("step must be positive");
        }
        if (self.hi - self.lo) / self.step > 1e6 {
            return bad("more than a million frames");
        }
        if self.width == 0 || self.height == 0 {
            return bad("image size must be at least 1x1");
        }
        Ok(())
    }

    /// lo, lo+step, … rounded to the step's decimal precision, ending with hi.
    pub fn weights(&self) -> Result<Vec<f64>, ProbeError> {
        self.check()?;
        let scale = 10f64.powi(decimals(self.step));
        let round = |v: f64| (v * scale).round() / scale;
        let mut out = Vec::new();
        for k in 0.. {
            let w = round(self.lo + k as f64 * self.step);
            if w >= self.hi || (self.hi - w) < self.step * 1e-9 {
                break;
            }
            out.push(w);
        }
        out.push(self.hi);
        Ok(out)
    }
}

/// Decimal digits needed to write `step` exactly (capped at 12).
fn decimals(step: f64) -> i32 {
    (0..12)
        .find(|&d| {
            let s = step * 10f64.powi(d);
            (s - s.round()).abs() < 1e-9 * s.max(1.0)
        })
        .unwrap_or(12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub weight: f64,
    pub image: ImageBuffer,
}

/// Per-pixel brightness change against the baseline frame, in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactMap {
    pub width: usize,
    pub height: usize,
    pub full_range: Vec<f64>,
    pub local_window: Vec<f64>,
    pub threshold: f64,
    pub changed_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactSummary {
    pub threshold: f64,
    pub changed_fraction: f64,
    pub full_range_max: f64,
    pub full_range_mean: f64,
    pub local_window_max: f64,
    pub local_window_mean: f64,
}

impl ImpactMap {
    pub fn summary(&self) -> ImpactSummary {
        let stats = |v: &[f64]| {
            let max = v.iter().copied().fold(0.0, f64::max);
            (max, v.iter().sum::<f64>() / v.len().max(1) as f64)
        };
        let (full_range_max, full_range_mean) = stats(&self.full_range);
        let (local_window_max, local_window_mean) = stats(&self.local_window);
        ImpactSummary {
            threshold: self.threshold,
            changed_fraction: self.changed_fraction,
            full_range_max,
            full_range_mean,
            local_window_max,
            local_window_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub baseline_weight: f64,
    pub baseline: ImageBuffer,
    pub frames: Vec<Frame>,
    pub impact: ImpactMap,
}

/// Renders the genome once per grid weight with only `spec.connection`
/// substituted. The genome itself is never touched.
pub fn sweep(
    genome: &Genome,
    spec: &SweepSpec,
    config: CppnConfig,
) -> Result<SweepResult, ProbeError> {
    let conn = genome
        .connection(spec.connection)
        .ok_or(ProbeError::UnknownConnection(spec.connection))?;
    if !conn.enabled {
        return Err(ProbeError::DisabledConnection(spec.connection));
    }
    let weights = spec.weights()?;
    let plan = CompiledCppn::new(genome, config)?;
    let baseline = plan.render(spec.width, spec.height)?;
    let frames = weights
        .par_iter()
        .map(|&weight| {
            let mut p = plan.clone();
            p.set_weight(spec.connection, weight)?;
            Ok(Frame {
                weight,
                image: p.render(spec.width, spec.height)?,
            })
        })
        .collect::<Result<Vec<_>, ProbeError>>()?;
    let impact = impact_from(&baseline, conn.weight, &frames, DEFAULT_THRESHOLD);
    Ok(SweepResult {
        spec: *spec,
        baseline_weight: conn.weight,
        baseline,
        frames,
        impact,
    })
}

/// Recomputes the impact maps of a sweep with another threshold.
pub fn impact_map(result: &SweepResult, threshold: f64) -> ImpactMap {
    impact_from(
        &result.baseline,
        result.baseline_weight,
        &result.frames,
        threshold,
    )
}

pub fn impact_from(
    baseline: &ImageBuffer,
    baseline_weight: f64,
    frames: &[Frame],
    threshold: f64,
) -> ImpactMap {
    let n = baseline.pixel_count();
    let c = baseline.channels;
    let mut full_range = vec![0.0; n];
    let mut local_window = vec![0.0; n];
    for frame in frames {
        let local = (frame.weight - baseline_weight).abs() <= LOCAL_WINDOW;
        for p in 0..n {
            let a = &baseline.data[p * c..(p + 1) * c];
            let b = &frame.image.data[p * c..(p + 1) * c];
            let delta = a
                .iter()
                .zip(b)
                .map(|(x, y)| x.abs_diff(*y))
                .max()
                .unwrap_or(0) as f64
                / 255.0;
            full_range[p] = f64::max(full_range[p], delta);
            if local {
                local_window[p] = f64::max(local_window[p], delta);
            }
        }
    }
    let changed = local_window.iter().filter(|&&d| d > threshold).count();
    ImpactMap {
        width: baseline.width,
        height: baseline.height,
        full_range,
        local_window,
        threshold,
        changed_fraction: changed as f64 / n.max(1) as f64,
    }
}
