//! Assembly of the maximum cooperation number N_mc = η_inh·η_s·μ·N.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::QuadratureSpec;

use super::attenuation::{
    absorption, attenuation, decoherence, effective_collective_rate, inhomogeneous_factor, peak_od,
    shadow_factor, stokes_gain,
};
use super::radial::{radial_mean_rate, radial_std, RadialQuantity};
use super::types::{AtomSpecies, DriveConfig, EnsembleGeometry};
use super::ModelError;

/// Pipeline stage names, used to report where a parameter point left the
/// model's domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McnStage {
    Input,
    MeanRate,
    StarkSpread,
    RateSpread,
    PeakOd,
    Absorption,
    StokesGain,
    EffectiveRate,
    ShadowFactor,
}

impl fmt::Display for McnStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            McnStage::Input => "input",
            McnStage::MeanRate => "mean_rate",
            McnStage::StarkSpread => "stark_spread",
            McnStage::RateSpread => "rate_spread",
            McnStage::PeakOd => "peak_od",
            McnStage::Absorption => "absorption",
            McnStage::StokesGain => "stokes_gain",
            McnStage::EffectiveRate => "effective_rate",
            McnStage::ShadowFactor => "shadow_factor",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("stage {stage}: {source}")]
pub struct McnError {
    pub stage: McnStage,
    #[source]
    pub source: ModelError,
}

trait AtStage<T> {
    fn at(self, stage: McnStage) -> Result<T, McnError>;
}

impl<T> AtStage<T> for Result<T, ModelError> {
    fn at(self, stage: McnStage) -> Result<T, McnError> {
        self.map_err(|source| McnError { stage, source })
    }
}

/// Every intermediate of the MCN evaluation. Rates are angular frequencies in
/// the species' rate unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McnBreakdown {
    pub n_atoms: f64,
    pub mean_rate_r: f64,
    pub delta_s: f64,
    pub delta_rate: f64,
    pub sigma_inh: f64,
    pub eta_inh: f64,
    pub alpha0: f64,
    pub alpha_det: f64,
    pub gamma_dec: f64,
    pub gain: f64,
    pub beta: f64,
    pub alpha_tilde: f64,
    pub eff_rate: f64,
    pub eta_s: f64,
    pub n_mu: f64,
    pub n_mc: f64,
}

impl McnBreakdown {
    /// N_mc/N_μ = η_inh·η_s.
    pub fn relative_mcn(&self) -> f64 {
        self.eta_inh * self.eta_s
    }
}

/// The β-independent part of the pipeline: radial averages, spreads,
/// inhomogeneous factor, optical depths, decoherence and Stokes gain.
///
/// Calibration evaluates the same (N, Δ_p) point for many β values, so this
/// is computed once and [`McnPrelude::finish`] supplies the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct McnPrelude {
    pub n_atoms: f64,
    pub drive: DriveConfig,
    pub geom: EnsembleGeometry,
    pub species: AtomSpecies,
    pub quad: QuadratureSpec,
    pub mean_rate_r: f64,
    pub delta_s: f64,
    pub delta_rate: f64,
    pub sigma_inh: f64,
    pub eta_inh: f64,
    pub alpha0: f64,
    pub alpha_det: f64,
    pub gamma_dec: f64,
    pub gain: f64,
}

impl McnPrelude {
    pub fn compute(
        n_atoms: f64,
        drive: &DriveConfig,
        geom: &EnsembleGeometry,
        species: &AtomSpecies,
        quad: &QuadratureSpec,
    ) -> Result<Self, McnError> {
        if !(n_atoms >= 0.0) || !n_atoms.is_finite() {
            return Err(McnError {
                stage: McnStage::Input,
                source: ModelError::InvalidParameter { name: "n_atoms", value: n_atoms },
            });
        }
        if drive.delta_p == 0.0 {
            return Err(McnError { stage: McnStage::Input, source: ModelError::ZeroDetuning });
        }
        let mean_rate_r = radial_mean_rate(drive, geom, species, quad).at(McnStage::MeanRate)?;
        let delta_s = radial_std(RadialQuantity::Stark, drive, geom, species, quad).at(McnStage::StarkSpread)?;
        let delta_rate = radial_std(RadialQuantity::Rate, drive, geom, species, quad).at(McnStage::RateSpread)?;
        let sigma_inh = delta_s + delta_rate;
        let eta_inh = inhomogeneous_factor(drive.tau_p, sigma_inh);
        let alpha0 = peak_od(n_atoms, geom, species, quad).at(McnStage::PeakOd)?;
        let alpha_det = absorption(alpha0, drive, geom, species, quad).at(McnStage::Absorption)?;
        let gamma_dec = decoherence(species, delta_s, mean_rate_r);
        let gain = stokes_gain(alpha0, mean_rate_r, gamma_dec).at(McnStage::StokesGain)?;
        Ok(Self {
            n_atoms,
            drive: *drive,
            geom: *geom,
            species: *species,
            quad: *quad,
            mean_rate_r,
            delta_s,
            delta_rate,
            sigma_inh,
            eta_inh,
            alpha0,
            alpha_det,
            gamma_dec,
            gain,
        })
    }

    pub fn alpha_tilde(&self, beta: f64) -> f64 {
        attenuation(self.alpha_det, beta, self.gain)
    }

    /// Effective collective rate and shadow factor for a given α̃.
    pub fn shadow(&self, alpha_tilde: f64) -> Result<(f64, f64), McnError> {
        let n_mu = self.geom.mu * self.n_atoms;
        if alpha_tilde == 0.0 {
            return Ok((n_mu * self.mean_rate_r, 1.0));
        }
        let eff = effective_collective_rate(self.n_atoms, &self.drive, &self.geom, &self.species, alpha_tilde, &self.quad)
            .at(McnStage::EffectiveRate)?;
        let eta_s = shadow_factor(eff, self.n_atoms, self.geom.mu, self.mean_rate_r).at(McnStage::ShadowFactor)?;
        // quadrature round-off must not push η_s above its bound
        Ok((eff, eta_s.min(1.0)))
    }

    pub fn finish(&self, beta: f64) -> Result<McnBreakdown, McnError> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(McnError {
                stage: McnStage::Input,
                source: ModelError::InvalidParameter { name: "beta", value: beta },
            });
        }
        let alpha_tilde = self.alpha_tilde(beta);
        let (eff_rate, eta_s) = self.shadow(alpha_tilde)?;
        let n_mu = self.geom.mu * self.n_atoms;
        Ok(McnBreakdown {
            n_atoms: self.n_atoms,
            mean_rate_r: self.mean_rate_r,
            delta_s: self.delta_s,
            delta_rate: self.delta_rate,
            sigma_inh: self.sigma_inh,
            eta_inh: self.eta_inh,
            alpha0: self.alpha0,
            alpha_det: self.alpha_det,
            gamma_dec: self.gamma_dec,
            gain: self.gain,
            beta,
            alpha_tilde,
            eff_rate,
            eta_s,
            n_mu,
            n_mc: self.eta_inh * eta_s * n_mu,
        })
    }
}

/// Evaluates the full MCN pipeline at one (N, Δ_p) point.
pub fn mcn(
    n_atoms: f64,
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    beta: f64,
    quad: &QuadratureSpec,
) -> Result<McnBreakdown, McnError> {
    McnPrelude::compute(n_atoms, drive, geom, species, quad)?.finish(beta)
}
