//! Linear scaling fits and the Γ_N/⟨Γ_R⟩ collapse.

use serde::{Deserialize, Serialize};

use crate::model::{gamma_n_from_delay, mcn};
use crate::numerics::{linfit, LinFitResult};

use super::{BetaChoice, CalibContext, CalibrationError, DelayPoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub fit: LinFitResult,
    pub excluded: Vec<usize>,
    pub n_used: usize,
}

/// Unweighted line through (xs, ys) with the listed indices left out.
pub fn scaling_fit(xs: &[f64], ys: &[f64], exclusions: &[usize]) -> Result<ScalingFit, CalibrationError> {
    if xs.len() != ys.len() {
        return Err(crate::numerics::NumericsError::LengthMismatch { expected: xs.len(), got: ys.len() }.into());
    }
    if let Some(&index) = exclusions.iter().find(|&&i| i >= xs.len()) {
        return Err(CalibrationError::InvalidExclusion { index, len: xs.len() });
    }
    let mut excluded = exclusions.to_vec();
    excluded.sort_unstable();
    excluded.dedup();
    let (kx, ky): (Vec<f64>, Vec<f64>) =
        (0..xs.len()).filter(|i| excluded.binary_search(i).is_err()).map(|i| (xs[i], ys[i])).unzip();
    let fit = linfit(&kx, &ky, None)?;
    Ok(ScalingFit { fit, n_used: kx.len(), excluded })
}

/// One point of the rate collapse: the collective rate inferred from the
/// measured delay, normalised by the single-atom rate, against N_mc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub n_atoms: f64,
    pub delta_p: f64,
    pub n_mc: f64,
    pub gamma_n_over_rate: f64,
}

/// Γ_N/⟨Γ_R⟩_r from each measured delay, with N_mc from the model at the
/// chosen β. Data following the delay law lies on the identity.
pub fn rate_collapse(points: &[DelayPoint], ctx: &CalibContext, beta: &BetaChoice) -> Result<Vec<CollapsePoint>, CalibrationError> {
    points
        .iter()
        .map(|p| {
            let drive = ctx.drive(p.delta_p)?;
            let b = mcn(p.n_atoms, &drive, &ctx.geom, &ctx.species, beta.at(p.delta_p), &ctx.quad)?;
            let gamma_n = gamma_n_from_delay(p.mean_t_d, p.n_atoms)?;
            Ok(CollapsePoint { n_atoms: p.n_atoms, delta_p: p.delta_p, n_mc: b.n_mc, gamma_n_over_rate: gamma_n / b.mean_rate_r })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_data() {
        let xs = [1.0, 2.0, 5.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x).collect();
        let f = scaling_fit(&xs, &ys, &[]).unwrap();
        assert!((f.fit.slope - 2.5).abs() < 1e-14);
        assert!(f.fit.intercept.abs() < 1e-13);
    }

    #[test]
    fn quadratic_against_square() {
        let n = [10.0, 20.0, 40.0, 80.0];
        let x2: Vec<f64> = n.iter().map(|v| v * v).collect();
        let ys: Vec<f64> = n.iter().map(|v| 3e-3 * v * v).collect();
        let f = scaling_fit(&x2, &ys, &[]).unwrap();
        assert!(f.fit.residual_sum_sq < 1e-20);
    }

    #[test]
    fn exclusions_are_echoed() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 2.0, 3.0, 2.0];
        let f = scaling_fit(&xs, &ys, &[3, 3]).unwrap();
        assert_eq!(f.excluded, vec![3]);
        assert_eq!(f.n_used, 3);
        assert!((f.fit.slope - 1.0).abs() < 1e-14);
        assert!(matches!(scaling_fit(&xs, &ys, &[4]), Err(CalibrationError::InvalidExclusion { index: 4, len: 4 })));
    }
}
