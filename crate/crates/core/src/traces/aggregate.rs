//! Per-shot analysis and aggregation over a run.

use serde::{Deserialize, Serialize};

use crate::numerics::summary_stats;

use super::{detect_bursts, fit_burst, BurstFeatures, DetectConfig, Trace, TraceError, MIN_FIT_SAMPLES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominantShape {
    FirstBurstDominant,
    SecondBurstDominant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotStatistics {
    pub mean_t_d: f64,
    pub std_t_d: f64,
    pub stderr_t_d: f64,
    pub mean_p_s: f64,
    pub std_p_s: f64,
    pub mean_tau_b: f64,
    pub std_tau_b: f64,
    pub n_shots: usize,
    pub dominant_shape: DominantShape,
}

/// Detects bursts and fits the earliest one. A later burst is fitted only to
/// report its peak ratio. Intervals too short to fit are ignored. Returns
/// `None` when no burst is found.
pub fn analyze_shot(trace: &Trace, t_zero: f64, cfg: &DetectConfig) -> Result<Option<BurstFeatures>, TraceError> {
    let intervals: Vec<_> = detect_bursts(trace, cfg).into_iter().filter(|iv| iv.len() >= MIN_FIT_SAMPLES).collect();
    let Some(first) = intervals.first() else {
        return Ok(None);
    };
    let mut features = fit_burst(trace, *first, t_zero)?;
    features.n_bursts = intervals.len();
    if let Some(second) = intervals.get(1) {
        if let Ok(f2) = fit_burst(trace, *second, t_zero) {
            features.second_peak_ratio = f2.p_s / features.p_s;
        }
    }
    Ok(Some(features))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn shot_statistics(features: &[BurstFeatures]) -> Result<ShotStatistics, TraceError> {
    if features.is_empty() {
        return Err(TraceError::NoShots);
    }
    let col = |f: fn(&BurstFeatures) -> f64| features.iter().map(f).collect::<Vec<_>>();
    let t_d = summary_stats(&col(|f| f.t_d))?;
    let p_s = summary_stats(&col(|f| f.p_s))?;
    let tau_b = summary_stats(&col(|f| f.tau_b))?;
    let dominant_shape = if median(col(|f| f.second_peak_ratio)) > 1.0 {
        DominantShape::SecondBurstDominant
    } else {
        DominantShape::FirstBurstDominant
    };
    Ok(ShotStatistics {
        mean_t_d: t_d.mean,
        std_t_d: t_d.std_dev,
        stderr_t_d: t_d.std_err,
        mean_p_s: p_s.mean,
        std_p_s: p_s.std_dev,
        mean_tau_b: tau_b.mean,
        std_tau_b: tau_b.std_dev,
        n_shots: features.len(),
        dominant_shape,
    })
}
