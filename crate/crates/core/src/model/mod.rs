//! Collective-decay model: single-atom rates, radial averages over the
//! atomic density, pump attenuation, and the maximum cooperation number.

mod attenuation;
mod delay;
mod mcn;
mod radial;
mod types;

pub use attenuation::{
    absorption, attenuation, decoherence, effective_collective_rate, homogeneous_bandwidth, inhomogeneous_factor,
    peak_od, peak_od_closed_form, shadow_factor, stokes_gain,
};
pub use delay::{delay_jitter_rel, delay_to_width_rate_ratio, gamma_n_from_delay, gamma_n_from_width, mean_delay};
pub use mcn::{mcn, McnBreakdown, McnError, McnPrelude, McnStage};
pub use radial::{pump_rabi, radial_average, radial_mean_rate, radial_std, scattering_rate, stark_shift, RadialQuantity};
pub use types::{AtomSpecies, DriveConfig, EnsembleGeometry, FresnelNumbers};

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("pump detuning is zero; the effective two-level model is undefined on resonance")]
    ZeroDetuning,
    #[error("Stark-shifted detuning vanishes")]
    VanishingEffectiveDetuning,
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("atom number {0} must exceed 1")]
    AtomNumberTooSmall(f64),
    #[error(transparent)]
    Quadrature(#[from] NumericsError),
}
