//! Pump switch-on reference: t = 0 is where the pump reaches half of its
//! plateau.

use super::{moving_average, Trace, TraceError};

/// Mean of the top decile of samples (at least one sample).
///
/// Samples are ranked by a moving average over 1% of the trace rather than
/// by their own values, so the selection does not favour upward noise.
pub fn plateau_mean(p: &[f64]) -> f64 {
    let ranked = moving_average(p, (p.len() / 100) | 1);
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| ranked[b].total_cmp(&ranked[a]));
    let k = (p.len() / 10).max(1);
    idx[..k].iter().map(|&i| p[i]).sum::<f64>() / k as f64
}

/// Time at which the pump first crosses 50% of its plateau mean.
///
/// Samples of the first rising edge between 30% and 70% of the plateau are
/// fitted with a quadratic, which is solved for the half level; the
/// curvature term keeps a smooth, non-linear rise from biasing the crossing.
/// When fewer than five such samples exist (a sharp step), the crossing is
/// linearly interpolated between the two samples that bracket it.
pub fn align_time_zero(pump: &Trace) -> Result<f64, TraceError> {
    let (t, p) = (pump.times(), pump.power());
    let plateau = plateau_mean(p);
    if !(plateau > 0.0) {
        return Err(TraceError::NoCrossing);
    }
    let half = 0.5 * plateau;
    let k = (1..p.len()).find(|&i| p[i - 1] < half && p[i] >= half).ok_or(TraceError::NoCrossing)?;

    // rising edge: from the last sample below 20% before k to the first above 80% after k
    let start = (0..k).rev().find(|&i| p[i] < 0.2 * plateau).unwrap_or(0);
    let end = (k..p.len()).find(|&i| p[i] > 0.8 * plateau).unwrap_or(p.len() - 1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..=end)
        .filter(|&i| (0.3 * plateau..=0.7 * plateau).contains(&p[i]))
        .map(|i| ((t[i] - t[k]) / pump.dt(), (p[i] - half) / plateau))
        .unzip();
    if xs.len() >= 5 {
        if let Some(x) = quadratic_root(&xs, &ys) {
            if x.abs() <= (end - start) as f64 {
                return Ok(t[k] + x * pump.dt());
            }
        }
    }
    let frac = (half - p[k - 1]) / (p[k] - p[k - 1]);
    Ok(t[k - 1] + frac * (t[k] - t[k - 1]))
}

/// Least-squares quadratic through (x, y), returning the root nearest x = 0
/// on the rising branch.
fn quadratic_root(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let mut s = [0.0; 5];
    let mut r = [0.0; 3];
    for (x, y) in xs.iter().zip(ys) {
        let u = x - xm;
        let mut pw = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += pw;
            if k < 3 {
                r[k] += pw * y;
            }
            pw *= u;
        }
    }
    // normal equations for y = a + b·u + c·u², solved by Cramer's rule
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let col = |j: usize| {
        let mut mm = m;
        for i in 0..3 {
            mm[i][j] = r[i];
        }
        det3(mm) / d
    };
    let (a, b, c) = (col(0), col(1), col(2));
    let u = if c.abs() <= 1e-12 * b.abs() {
        -a / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        // the root with positive slope b + 2cu, in a cancellation-free form
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (u1, u2) = (q / c, a / q);
        if b + 2.0 * c * u1 > 0.0 && (b + 2.0 * c * u2 <= 0.0 || (u1 + xm).abs() < (u2 + xm).abs()) {
            u1
        } else {
            u2
        }
    };
    let x = u + xm;
    (x.is_finite() && b + 2.0 * c * u > 0.0).then_some(x)
}
