//! Least-squares fit of a single burst, P(t) = A·sech²((t − t₀)/τ) + b.

use serde::{Deserialize, Serialize};

use super::{Interval, Trace, TraceError};

/// FWHM of sech²(x/τ) in units of τ: 2·arccosh(√2).
pub const SECH2_FWHM: f64 = 1.762_747_174_039_086;

pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitQuality {
    Converged,
    /// The fit failed; amplitude, time and width are raw-sample estimates.
    RawFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurstFeatures {
    /// Peak time of the first burst relative to t = 0.
    pub t_d: f64,
    /// Fitted peak power A.
    pub p_s: f64,
    /// FWHM of the fitted burst.
    pub tau_b: f64,
    /// Time of the largest raw sample relative to t = 0.
    pub t_d_raw: f64,
    pub n_bursts: usize,
    /// Peak power of the second burst over the first, 0 without one.
    pub second_peak_ratio: f64,
    /// RMS residual; +∞ when the fit fell back to raw estimates.
    pub fit_rms: f64,
    pub quality: FitQuality,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Params {
    amp: f64,
    t0: f64,
    tau: f64,
    base: f64,
}

fn model_and_grad(x: f64, q: &Params) -> (f64, [f64; 4]) {
    let u = (x - q.t0) / q.tau;
    let s = 1.0 / u.cosh();
    let s2 = s * s;
    let th = u.tanh();
    let d = 2.0 * q.amp * s2 * th / q.tau;
    (q.amp * s2 + q.base, [s2, d, d * u, 1.0])
}

fn cost(xs: &[f64], ys: &[f64], q: &Params) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| (y - model_and_grad(*x, q).0).powi(2)).sum()
}

/// Solves the 4×4 system `a·x = b` by Gaussian elimination with partial
/// pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (v, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Levenberg–Marquardt with Marquardt's diagonal scaling. Returns the
/// parameters and the final cost, or `None` without convergence.
fn levenberg_marquardt(xs: &[f64], ys: &[f64], start: Params) -> Option<(Params, f64)> {
    let mut q = start;
    let mut c = cost(xs, ys, &q);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (x, y) in xs.iter().zip(ys) {
            let (f, g) = model_and_grad(*x, &q);
            let r = y - f;
            for i in 0..4 {
                jtr[i] += g[i] * r;
                for j in 0..4 {
                    jtj[i][j] += g[i] * g[j];
                }
            }
        }
        loop {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-300);
            }
            let step = solve4(a, jtr)?;
            let trial = Params { amp: q.amp + step[0], t0: q.t0 + step[1], tau: q.tau + step[2], base: q.base + step[3] };
            let ct = if trial.tau > 0.0 { cost(xs, ys, &trial) } else { f64::INFINITY };
            if ct.is_finite() && ct <= c {
                let small = (step[0].abs() <= 1e-12 * q.amp.abs().max(f64::MIN_POSITIVE))
                    && (step[1].abs() <= 1e-12 * q.tau)
                    && (step[2].abs() <= 1e-12 * q.tau);
                let stalled = c - ct <= 1e-15 * c;
                q = trial;
                c = ct;
                lambda = (lambda * 0.3).max(1e-12);
                if small || stalled || c == 0.0 {
                    return Some((q, c));
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                // no downhill step left: at a minimum to working precision
                return Some((q, c));
            }
        }
    }
    None
}

/// Raw half-maximum full width over the interval, measured from the
/// interval minimum.
fn raw_fwhm(t: &[f64], p: &[f64], peak: usize) -> f64 {
    let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
    let half = lo + 0.5 * (p[peak] - lo);
    let cross = |i: usize, j: usize| t[i] + (half - p[i]) / (p[j] - p[i]) * (t[j] - t[i]);
    let left = (1..=peak).rev().find(|&i| p[i - 1] < half).map(|i| cross(i - 1, i)).unwrap_or(t[0]);
    let right = (peak..p.len() - 1).find(|&i| p[i + 1] < half).map(|i| cross(i, i + 1)).unwrap_or(t[p.len() - 1]);
    right - left
}

/// Fits one burst inside `interval` and reports its features relative to
/// `t_zero`. `n_bursts` and `second_peak_ratio` are left at 1 and 0.
pub fn fit_burst(trace: &Trace, interval: Interval, t_zero: f64) -> Result<BurstFeatures, TraceError> {
    if interval.end > trace.len() || interval.len() < MIN_FIT_SAMPLES {
        return Err(TraceError::IntervalTooShort(interval.len()));
    }
    let t = &trace.times()[interval.start..interval.end];
    let p = &trace.power()[interval.start..interval.end];
    let dt = trace.dt();
    let peak = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).expect("non-empty interval");
    let t_raw = t[peak];
    let fallback = |p_peak: f64| -> Result<BurstFeatures, TraceError> {
        if !(p_peak > 0.0) {
            return Err(TraceError::NoSignal);
        }
        Ok(BurstFeatures {
            t_d: t_raw - t_zero,
            p_s: p_peak,
            tau_b: raw_fwhm(t, p, peak).max(dt),
            t_d_raw: t_raw - t_zero,
            n_bursts: 1,
            second_peak_ratio: 0.0,
            fit_rms: f64::INFINITY,
            quality: FitQuality::RawFallback,
        })
    };

    // work in units of dt around the raw peak and of the raw peak height
    let base0 = {
        let mut sorted = p.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted[sorted.len() / 10]
    };
    let amp_scale = p[peak] - base0;
    if !(amp_scale > 0.0) {
        return fallback(p[peak]);
    }
    let xs: Vec<f64> = t.iter().map(|ti| (ti - t_raw) / dt).collect();
    let ys: Vec<f64> = p.iter().map(|pi| (pi - base0) / amp_scale).collect();
    let width = raw_fwhm(t, p, peak) / dt;
    let start = Params { amp: 1.0, t0: 0.0, tau: (width / SECH2_FWHM).max(1.0), base: 0.0 };

    let span = xs[xs.len() - 1] - xs[0];
    match levenberg_marquardt(&xs, &ys, start) {
        Some((q, c))
            if q.amp > 0.0
                && q.tau > 0.0
                && q.tau < span
                && q.t0 >= xs[0]
                && q.t0 <= xs[xs.len() - 1]
                && c.is_finite() =>
        {
            let t0 = t_raw + q.t0 * dt;
            Ok(BurstFeatures {
                t_d: t0 - t_zero,
                p_s: q.amp * amp_scale,
                tau_b: SECH2_FWHM * q.tau * dt,
                t_d_raw: t_raw - t_zero,
                n_bursts: 1,
                second_peak_ratio: 0.0,
                fit_rms: (c / xs.len() as f64).sqrt() * amp_scale,
                quality: FitQuality::Converged,
            })
        }
        _ => fallback(p[peak]),
    }
}
