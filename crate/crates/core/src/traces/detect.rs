//! Burst detection on a smoothed trace against a noise-relative threshold.

use serde::{Deserialize, Serialize};

use super::Trace;

/// Half-open sample range `[start, end)` of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.start..self.end).contains(&i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    /// Threshold above baseline in units of the smoothed noise std.
    pub min_prominence_sigma: f64,
    /// Moving-average width (s); normally the pump rise time.
    pub smoothing_time: f64,
    /// Leading fraction of the trace used to estimate baseline and noise.
    pub noise_fraction: f64,
    /// Threshold floor as a fraction of the largest smoothed excursion, so
    /// noiseless traces still yield finite intervals.
    pub floor_fraction: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self { min_prominence_sigma: 5.0, smoothing_time: 130e-9, noise_fraction: 0.1, floor_fraction: 0.05 }
    }
}

fn edge_half_width(i: usize, n: usize, half: usize) -> usize {
    half.min(i).min(n - 1 - i)
}

/// Centered moving average; the window shrinks symmetrically at the edges.
pub fn moving_average(p: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let mut prefix = Vec::with_capacity(p.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in p {
        acc += v;
        prefix.push(acc);
    }
    (0..p.len())
        .map(|i| {
            let h = edge_half_width(i, p.len(), half);
            (prefix[i + h + 1] - prefix[i - h]) / (2 * h + 1) as f64
        })
        .collect()
}

pub(crate) fn smoothing_width(trace: &Trace, cfg: &DetectConfig) -> usize {
    let w = (cfg.smoothing_time / trace.dt()).round();
    if w.is_finite() && w > 3.0 {
        (w as usize).min(trace.len())
    } else {
        3
    }
}

/// Finds bursts as ordered, disjoint sample intervals.
///
/// The trace is smoothed with a centered moving average; baseline and raw
/// noise std come from the leading `noise_fraction` of samples, and the
/// smoothed noise at a sample averaging m raw samples is σ_raw/√m (m = w
/// away from the edges), combined in quadrature with the uncertainty of the
/// baseline itself. Runs of samples above
/// `baseline + max(k·σ, floor·prominence)` form the burst cores.
/// Cores separated by less than one smoothing window are merged, and each
/// core is then widened by half its length on both sides, never past the
/// midpoint to its neighbour, so that the fit sees the burst wings.
pub fn detect_bursts(trace: &Trace, cfg: &DetectConfig) -> Vec<Interval> {
    let p = trace.power();
    let n = p.len();
    let w = smoothing_width(trace, cfg);
    let smooth = moving_average(p, w);

    let n_noise = ((n as f64 * cfg.noise_fraction) as usize).clamp(2, n);
    let window = &p[..n_noise];
    let baseline = window.iter().sum::<f64>() / n_noise as f64;
    let var = window.iter().map(|v| (v - baseline).powi(2)).sum::<f64>() / (n_noise - 1) as f64;
    let sigma_raw = var.sqrt();

    let prominence = smooth.iter().fold(0.0_f64, |m, v| m.max(v - baseline));
    if !(prominence > 0.0) {
        return Vec::new();
    }
    let floor = cfg.floor_fraction * prominence;
    let above = |i: usize| {
        let m = (2 * edge_half_width(i, n, w / 2) + 1) as f64;
        let sigma = sigma_raw * (1.0 / m + 1.0 / n_noise as f64).sqrt();
        smooth[i] > baseline + (cfg.min_prominence_sigma * sigma).max(floor)
    };

    let mut cores: Vec<Interval> = Vec::new();
    let mut i = 0;
    while i < n {
        if above(i) {
            let start = i;
            while i < n && above(i) {
                i += 1;
            }
            cores.push(Interval { start, end: i });
        } else {
            i += 1;
        }
    }

    let mut merged: Vec<Interval> = Vec::with_capacity(cores.len());
    for c in cores {
        match merged.last_mut() {
            Some(last) if c.start - last.end < w => last.end = c.end,
            _ => merged.push(c),
        }
    }

    let m = merged.len();
    (0..m)
        .map(|k| {
            let c = merged[k];
            let pad = c.len() / 2;
            let lo_limit = if k == 0 { 0 } else { (merged[k - 1].end + c.start) / 2 };
            let hi_limit = if k + 1 == m { n } else { (c.end + merged[k + 1].start) / 2 };
            Interval { start: c.start.saturating_sub(pad).max(lo_limit), end: (c.end + pad).min(hi_limit) }
        })
        .collect()
}
