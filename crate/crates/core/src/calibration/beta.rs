//! Per-detuning β fits and the linear β(Δ_p) law.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{mean_delay, McnPrelude};
use crate::numerics::{linfit, minimize_scalar, LinFitResult, NumericsError};

use super::dataset::{same_detuning, DelayDataset, DelayPoint};
use super::{CalibContext, CalibrationError};

const BETA_MAX: f64 = 2.0;
const SCAN_POINTS: usize = 41;

/// Model mean delay ⟨t_D⟩ = [ln√(2πN)]²/(4·N_mc·⟨Γ_R⟩_r) at (N, Δ_p, β).
pub fn model_delay(ctx: &CalibContext, n_atoms: f64, delta_p: f64, beta: f64) -> Result<f64, CalibrationError> {
    let drive = ctx.drive(delta_p)?;
    let pre = McnPrelude::compute(n_atoms, &drive, &ctx.geom, &ctx.species, &ctx.quad)?;
    delay_from_prelude(&pre, beta)
}

fn delay_from_prelude(pre: &McnPrelude, beta: f64) -> Result<f64, CalibrationError> {
    let b = pre.finish(beta)?;
    Ok(mean_delay(b.n_mc, b.mean_rate_r, b.n_atoms)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub delta_p: f64,
    pub beta: f64,
    /// Weighted sum of squared delay residuals at the optimum.
    pub objective: f64,
    pub n_points: usize,
    /// The optimum sits on an end of the search interval [0, 2].
    pub at_boundary: bool,
    pub warnings: Vec<String>,
}

/// Fits β at one detuning by weighted least squares on the mean delays.
///
/// Weights are n_shots/std² when every point carries a positive std, and
/// uniform otherwise. A 41-point scan over [0, 2] locates the basin, which
/// is then refined with a bounded Brent search; a scan showing more than one
/// local minimum adds a warning.
pub fn fit_beta_single(delta_p: f64, points: &[DelayPoint], ctx: &CalibContext) -> Result<BetaFit, CalibrationError> {
    let pts: Vec<&DelayPoint> = points.iter().filter(|p| same_detuning(p.delta_p, delta_p)).collect();
    if pts.len() < 2 {
        return Err(CalibrationError::InsufficientPoints { delta_p, found: pts.len() });
    }
    let drive = ctx.drive(delta_p)?;
    let preludes = pts
        .iter()
        .map(|p| McnPrelude::compute(p.n_atoms, &drive, &ctx.geom, &ctx.species, &ctx.quad))
        .collect::<Result<Vec<_>, _>>()?;
    let weighted = pts.iter().all(|p| p.std_t_d > 0.0);
    let weights: Vec<f64> =
        pts.iter().map(|p| if weighted { p.n_shots as f64 / (p.std_t_d * p.std_t_d) } else { 1.0 }).collect();

    let first_error = std::cell::RefCell::new(None);
    let objective = |beta: f64| -> f64 {
        let mut sum = 0.0;
        for ((pre, p), w) in preludes.iter().zip(&pts).zip(&weights) {
            match delay_from_prelude(pre, beta) {
                Ok(t) => sum += w * (t - p.mean_t_d).powi(2),
                Err(e) => {
                    first_error.borrow_mut().get_or_insert(e);
                    return f64::NAN;
                }
            }
        }
        sum
    };

    let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| BETA_MAX * i as f64 / (SCAN_POINTS - 1) as f64).collect();
    let scan: Vec<f64> = grid.iter().map(|&b| objective(b)).collect();
    if let Some(e) = first_error.borrow_mut().take() {
        return Err(e);
    }
    let best = (0..SCAN_POINTS).min_by(|&a, &b| scan[a].total_cmp(&scan[b])).expect("non-empty scan");
    let mut warnings = Vec::new();
    let local_minima = (0..SCAN_POINTS)
        .filter(|&i| (i == 0 || scan[i] < scan[i - 1]) && (i + 1 == SCAN_POINTS || scan[i] < scan[i + 1]))
        .count();
    if local_minima > 1 {
        warnings.push(format!("objective is not unimodal on [0, {BETA_MAX}]: {local_minima} local minima in the scan"));
    }

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(SCAN_POINTS - 1)];
    let (beta, value) = match minimize_scalar(objective, (lo, hi), 1e-9) {
        Ok(m) => (m.x, m.value),
        Err(NumericsError::BoundaryMinimum { x, value }) => (x, value),
        Err(e) => {
            if let Some(model_err) = first_error.borrow_mut().take() {
                return Err(model_err);
            }
            return Err(e.into());
        }
    };
    let at_boundary = beta <= 0.0 || beta >= BETA_MAX;
    if beta >= BETA_MAX {
        warnings.push(format!("β reached the upper search bound {BETA_MAX}"));
    }
    Ok(BetaFit { delta_p, beta, objective: value, n_points: pts.len(), at_boundary, warnings })
}

/// [`fit_beta_single`] at every detuning of the dataset, ascending in Δ_p.
/// Detunings with fewer than two points yield an error entry.
pub fn fit_beta_per_detuning(data: &DelayDataset, ctx: &CalibContext) -> Vec<(f64, Result<BetaFit, CalibrationError>)> {
    data.detunings().into_par_iter().map(|d| (d, fit_beta_single(d, &data.points, ctx))).collect()
}

/// β(Δ_p) = intercept + slope·Δ_p/Γ, clamped at zero. Detunings in units of Γ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaLaw {
    pub intercept: f64,
    pub slope: f64,
    pub valid_min_detuning: f64,
}

impl BetaLaw {
    /// β = 0.182 − 6.1×10⁻³·Δ_p/Γ, fitted above 6Γ.
    pub const PUBLISHED: BetaLaw = BetaLaw { intercept: 0.182, slope: -6.1e-3, valid_min_detuning: 6.0 };

    pub fn eval(&self, delta_p: f64) -> f64 {
        (self.intercept + self.slope * delta_p).max(0.0)
    }

    pub fn is_valid_at(&self, delta_p: f64) -> bool {
        delta_p > self.valid_min_detuning
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaLawFit {
    pub law: BetaLaw,
    pub fit: LinFitResult,
    /// Indices of samples at or below the detuning threshold.
    pub excluded: Vec<usize>,
}

/// Unweighted straight-line fit of β against Δ_p over samples with
/// Δ_p > `min_detuning`.
pub fn fit_beta_law(samples: &[(f64, f64)], min_detuning: f64) -> Result<BetaLawFit, CalibrationError> {
    let (kept, excluded): (Vec<usize>, Vec<usize>) = (0..samples.len()).partition(|&i| samples[i].0 > min_detuning);
    if kept.len() < 2 {
        return Err(CalibrationError::InsufficientDetunings(kept.len()));
    }
    let xs: Vec<f64> = kept.iter().map(|&i| samples[i].0).collect();
    let ys: Vec<f64> = kept.iter().map(|&i| samples[i].1).collect();
    let fit = linfit(&xs, &ys, None)?;
    Ok(BetaLawFit {
        law: BetaLaw { intercept: fit.intercept, slope: fit.slope, valid_min_detuning: min_detuning },
        fit,
        excluded,
    })
}
