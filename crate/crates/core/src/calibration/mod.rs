//! β calibration against measured delays, the linear β(Δ_p) law, scaling
//! fits and MCN maps.

mod beta;
mod dataset;
mod map;
mod scaling;

pub use beta::{fit_beta_law, fit_beta_per_detuning, fit_beta_single, model_delay, BetaFit, BetaLaw, BetaLawFit};
pub use dataset::{DelayDataset, DelayPoint};
pub use map::{mcn_map, BetaChoice, BoundaryPoint, MapCell, MapGrid, McnMap};
pub use scaling::{rate_collapse, scaling_fit, CollapsePoint, ScalingFit};

use serde::{Deserialize, Serialize};

use crate::model::{AtomSpecies, DriveConfig, EnsembleGeometry, McnError, ModelError};
use crate::numerics::{NumericsError, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalibrationError {
    #[error("need at least 2 points at detuning {delta_p}, found {found}")]
    InsufficientPoints { delta_p: f64, found: usize },
    #[error("need at least 2 detunings above the threshold, found {0}")]
    InsufficientDetunings(usize),
    #[error("exclusion index {index} out of range for {len} points")]
    InvalidExclusion { index: usize, len: usize },
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Model(#[from] McnError),
    #[error("delay law: {0}")]
    Delay(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Model inputs shared by every calibration point: everything except the
/// atom number, the detuning and β. Rates in the species' unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibContext {
    pub species: AtomSpecies,
    pub geom: EnsembleGeometry,
    /// Peak Rabi frequency Ω_p⁽⁰⁾/Γ.
    pub omega_p0: f64,
    /// Pump rise time (reciprocal rate unit).
    pub tau_p: f64,
    #[serde(skip)]
    pub quad: QuadratureSpec,
}

impl CalibContext {
    /// Reference setting: ⁸⁷Rb D1 in SI units, the hollow-core-fiber
    /// geometry, Ω_p⁽⁰⁾ = 6.4Γ and τ_p = 130 ns.
    pub fn reference() -> Self {
        Self {
            species: AtomSpecies::rb87_d1(),
            geom: EnsembleGeometry::hollow_core_fiber(),
            omega_p0: 6.4,
            tau_p: 130e-9,
            quad: QuadratureSpec::default(),
        }
    }

    pub fn drive(&self, delta_p: f64) -> Result<DriveConfig, ModelError> {
        DriveConfig::new(self.omega_p0, delta_p, self.tau_p)
    }
}

