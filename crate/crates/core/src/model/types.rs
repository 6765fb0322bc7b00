use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ModelError;

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

/// Constants of the effective two-level system.
///
/// `gamma` and `gamma0` are angular frequencies in whatever rate unit the
/// caller works in (rad/s, or units of Γ with `gamma = 1`). Every time in the
/// model must then be expressed in the reciprocal unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    /// Excited-state decay rate Γ.
    pub gamma: f64,
    /// Transition wavelength (m).
    pub lambda: f64,
    /// Branching ratio into the second ground state.
    pub branching: f64,
    /// Resonant absorption cross-section (m²).
    pub sigma13: f64,
    /// Residual ground-state decoherence rate.
    pub gamma0: f64,
}

impl AtomSpecies {
    pub fn new(gamma: f64, lambda: f64, branching: f64, sigma13: f64, gamma0: f64) -> Result<Self, ModelError> {
        positive("gamma", gamma)?;
        positive("lambda", lambda)?;
        positive("sigma13", sigma13)?;
        positive("gamma0", gamma0)?;
        if !(branching > 0.0 && branching <= 1.0) {
            return Err(ModelError::InvalidParameter { name: "branching", value: branching });
        }
        Ok(Self { gamma, lambda, branching, sigma13, gamma0 })
    }

    /// ⁸⁷Rb D1 line, F=1 → F'=2, in SI units (rad/s, m, m²).
    ///
    /// The cross-section is chosen so that the ensemble of
    /// [`EnsembleGeometry::hollow_core_fiber`] has an OD per atom of 2.75×10⁻³.
    pub fn rb87_d1() -> Self {
        let gamma = 2.0 * PI * 5.75e6;
        Self { gamma, lambda: 795e-9, branching: 0.5, sigma13: 5.763e-14, gamma0: 0.057 * gamma }
    }

    /// Same species with every rate multiplied by `k` (times then scale by 1/k).
    pub fn in_rate_units(&self, k: f64) -> Self {
        Self { gamma: self.gamma * k, gamma0: self.gamma0 * k, ..*self }
    }
}

/// Radial and longitudinal extent of the atomic ensemble and the pump mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleGeometry {
    /// Radial 1/e half-width of the atomic density (m).
    pub sigma_a: f64,
    /// Radial 1/e² half-width of the pump intensity (m).
    pub sigma_p: f64,
    /// Ensemble length L (m).
    pub length: f64,
    /// Fiber core radius r_c (m).
    pub core_radius: f64,
    /// Geometric factor μ = NA²/4.
    pub mu: f64,
    /// Numerical aperture of the guided mode.
    pub na: f64,
}

impl EnsembleGeometry {
    /// Derives the numerical aperture from the mode radius, NA = λ/(πσ_p).
    pub fn new(sigma_a: f64, sigma_p: f64, length: f64, core_radius: f64, lambda: f64) -> Result<Self, ModelError> {
        positive("lambda", lambda)?;
        let na = lambda / (PI * positive("sigma_p", sigma_p)?);
        Self::with_numerical_aperture(sigma_a, sigma_p, length, core_radius, na)
    }

    pub fn with_numerical_aperture(
        sigma_a: f64,
        sigma_p: f64,
        length: f64,
        core_radius: f64,
        na: f64,
    ) -> Result<Self, ModelError> {
        positive("sigma_a", sigma_a)?;
        positive("sigma_p", sigma_p)?;
        positive("length", length)?;
        positive("core_radius", core_radius)?;
        positive("na", na)?;
        if sigma_a >= core_radius {
            return Err(ModelError::InvalidParameter { name: "core_radius", value: core_radius });
        }
        Ok(Self { sigma_a, sigma_p, length, core_radius, mu: na * na / 4.0, na })
    }

    /// Atoms guided in a 7.5 µm-core hollow-core fiber: σ_a = 1.7 µm,
    /// σ_p = 2.75 µm, L = 3 cm, λ = 795 nm.
    pub fn hollow_core_fiber() -> Self {
        Self::new(1.7e-6, 2.75e-6, 0.03, 3.75e-6, 795e-9).expect("reference geometry is valid")
    }

    pub fn fresnel(&self, species: &AtomSpecies) -> FresnelNumbers {
        FresnelNumbers {
            free_space: PI * self.sigma_a * self.sigma_a / (species.lambda * self.length),
            effective: self.sigma_a / self.sigma_p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelNumbers {
    /// F = πσ_a²/(λL)
    pub free_space: f64,
    /// F' = σ_a/σ_p
    pub effective: f64,
}

/// One pump setting. Rabi frequency and detuning are stored in units of Γ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Peak Rabi frequency Ω_p⁽⁰⁾ / Γ.
    pub omega_p0: f64,
    /// Detuning Δ_p / Γ.
    pub delta_p: f64,
    /// Pump rise time, in the reciprocal of the species' rate unit.
    pub tau_p: f64,
}

impl DriveConfig {
    pub fn new(omega_p0: f64, delta_p: f64, tau_p: f64) -> Result<Self, ModelError> {
        positive("omega_p0", omega_p0)?;
        positive("tau_p", tau_p)?;
        if delta_p == 0.0 || !delta_p.is_finite() {
            return Err(ModelError::ZeroDetuning);
        }
        Ok(Self { omega_p0, delta_p, tau_p })
    }

    pub fn omega_abs(&self, species: &AtomSpecies) -> f64 {
        self.omega_p0 * species.gamma
    }

    pub fn delta_abs(&self, species: &AtomSpecies) -> f64 {
        self.delta_p * species.gamma
    }

    pub fn with_detuning(&self, delta_p: f64) -> Self {
        Self { delta_p, ..*self }
    }

    /// Counterpart of [`AtomSpecies::in_rate_units`].
    pub fn in_rate_units(&self, k: f64) -> Self {
        Self { tau_p: self.tau_p / k, ..*self }
    }
}
