//! Optical depth, pump attenuation, and the two MCN reduction factors.

use std::f64::consts::PI;

use crate::numerics::{integrate, QuadratureSpec};

use super::radial::{pump_rabi, radial_mean_rate, scattering_rate, stark_shift, try_radial_average};
use super::types::{AtomSpecies, DriveConfig, EnsembleGeometry};
use super::ModelError;

/// Homogeneous excitation bandwidth set by the pump rise time.
///
/// Taken as an angular frequency, σ_hom = 1/τ_p (no factor 2π). This is the
/// only place the convention enters.
pub fn homogeneous_bandwidth(tau_p: f64) -> f64 {
    1.0 / tau_p
}

/// η_inh = min(1, σ_hom/σ_inh). Exactly 1 when σ_inh = 0.
pub fn inhomogeneous_factor(tau_p: f64, sigma_inh: f64) -> f64 {
    let hom = homogeneous_bandwidth(tau_p);
    if sigma_inh <= hom {
        1.0
    } else {
        hom / sigma_inh
    }
}

/// Peak optical depth α₀ of `n_atoms` atoms with a Gaussian radial density of
/// 1/e width σ_a (normalised over the full plane), integrated to the core
/// radius.
pub fn peak_od(n_atoms: f64, geom: &EnsembleGeometry, species: &AtomSpecies, quad: &QuadratureSpec) -> Result<f64, ModelError> {
    if !(n_atoms >= 0.0) {
        return Err(ModelError::InvalidParameter { name: "n_atoms", value: n_atoms });
    }
    if n_atoms == 0.0 {
        return Ok(0.0);
    }
    let (sa, sp) = (geom.sigma_a, geom.sigma_p);
    let peak_density = n_atoms / (PI * geom.length * sa * sa);
    // integrate in ρ = r/σ_a
    let rho_c = geom.core_radius / sa;
    let k = 2.0 * sa * sa / (sp * sp);
    let radial = integrate(|rho| rho * (-rho * rho * (1.0 + k)).exp(), 0.0, rho_c, quad)?;
    Ok(4.0 / (sp * sp) * geom.length * species.sigma13 * peak_density * sa * sa * radial)
}

/// r_c → ∞ limit of [`peak_od`]: α₀ = 2σ₁₃N/(π(σ_p² + 2σ_a²)).
pub fn peak_od_closed_form(n_atoms: f64, geom: &EnsembleGeometry, species: &AtomSpecies) -> f64 {
    2.0 * species.sigma13 * n_atoms / (PI * (geom.sigma_p.powi(2) + 2.0 * geom.sigma_a.powi(2)))
}

/// Detuned optical depth α(Δ_p) = α₀·⟨Γ²/(4[Δ_p + 2S(r,0)]²)⟩_r.
pub fn absorption(
    alpha0: f64,
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    quad: &QuadratureSpec,
) -> Result<f64, ModelError> {
    if alpha0 == 0.0 {
        return Ok(0.0);
    }
    let delta = drive.delta_abs(species);
    let g = species.gamma;
    let lorentz = try_radial_average(
        |r| {
            let omega = pump_rabi(r, 0.0, drive, geom, species, 0.0);
            let shifted = delta + 2.0 * stark_shift(omega, delta)?;
            if shifted == 0.0 {
                return Err(ModelError::VanishingEffectiveDetuning);
            }
            Ok(g * g / (4.0 * shifted * shifted))
        },
        geom,
        quad,
    )?;
    Ok(alpha0 * lorentz)
}

/// Total ground-state decoherence γ = γ₀ + δS + ⟨Γ_R⟩_r.
pub fn decoherence(species: &AtomSpecies, delta_s: f64, mean_rate_r: f64) -> f64 {
    species.gamma0 + delta_s + mean_rate_r
}

/// Initial radially averaged Stokes gain G_s ≈ α₀·2⟨Γ_R⟩_r/γ.
pub fn stokes_gain(alpha0: f64, mean_rate_r: f64, gamma_dec: f64) -> Result<f64, ModelError> {
    if !(gamma_dec > 0.0) {
        return Err(ModelError::InvalidParameter { name: "gamma_dec", value: gamma_dec });
    }
    Ok(alpha0 * 2.0 * mean_rate_r / gamma_dec)
}

/// Total attenuation factor α̃ = α + β·G_s.
pub fn attenuation(alpha_det: f64, beta: f64, gain: f64) -> f64 {
    alpha_det + beta * gain
}

/// ⟨Γ_N^eff⟩_{r,z} = μN·∫₀¹dz′ ⟨Γ_R[Ω_p(r, z′)]⟩_r, the Stark shift following
/// the attenuated pump.
pub fn effective_collective_rate(
    n_atoms: f64,
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    alpha_tilde: f64,
    quad: &QuadratureSpec,
) -> Result<f64, ModelError> {
    if n_atoms == 0.0 {
        return Ok(0.0);
    }
    if alpha_tilde == 0.0 {
        return Ok(geom.mu * n_atoms * radial_mean_rate(drive, geom, species, quad)?);
    }
    Ok(geom.mu * n_atoms * longitudinal_mean_rate(drive, geom, species, alpha_tilde, quad)?)
}

/// ∫₀¹dz′ ⟨Γ_R[Ω_p(r, z′)]⟩_r.
pub(crate) fn longitudinal_mean_rate(
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    alpha_tilde: f64,
    quad: &QuadratureSpec,
) -> Result<f64, ModelError> {
    let inner = QuadratureSpec { rel_tol: (quad.rel_tol * 1e-2).max(1e-14), ..*quad };
    let delta = drive.delta_abs(species);
    let failure = std::cell::RefCell::new(None);
    let value = integrate(
        |z| {
            let at_z = try_radial_average(
                |r| scattering_rate(pump_rabi(r, z, drive, geom, species, alpha_tilde), delta, species),
                geom,
                &inner,
            );
            match at_z {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value?)
}

/// η_s = ⟨Γ_N^eff⟩_{r,z}/(μN⟨Γ_R⟩_r).
pub fn shadow_factor(eff_rate: f64, n_atoms: f64, mu: f64, mean_rate_r: f64) -> Result<f64, ModelError> {
    let denom = mu * n_atoms * mean_rate_r;
    if !(denom > 0.0) {
        return Err(ModelError::InvalidParameter { name: "mu*N*<Gamma_R>", value: denom });
    }
    Ok(eff_rate / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (DriveConfig, EnsembleGeometry, AtomSpecies, QuadratureSpec) {
        (
            DriveConfig::new(6.4, 18.4, 130e-9).unwrap(),
            EnsembleGeometry::hollow_core_fiber(),
            AtomSpecies::rb87_d1(),
            QuadratureSpec::default(),
        )
    }

    #[test]
    fn inhomogeneous_factor_clamps() {
        assert_eq!(inhomogeneous_factor(130e-9, 0.0), 1.0);
        assert_eq!(inhomogeneous_factor(1.0, 2.0), 0.5);
        assert_eq!(inhomogeneous_factor(1.0, 0.5), 1.0);
    }

    #[test]
    fn optical_depth_per_atom() {
        let (_, g, s, q) = setup();
        assert_eq!(peak_od(0.0, &g, &s, &q).unwrap(), 0.0);
        let per_atom = peak_od(1.0, &g, &s, &q).unwrap();
        assert!((per_atom - 2.75e-3).abs() < 1e-5, "{per_atom}");
        let a = peak_od(2.2e5, &g, &s, &q).unwrap();
        assert!((a - 605.0).abs() < 3.0, "{a}");
    }

    #[test]
    fn optical_depth_closed_form_for_wide_core() {
        let (_, g0, s, q) = setup();
        let g = EnsembleGeometry { core_radius: 5.0 * g0.sigma_a, ..g0 };
        let n = 8.3e4;
        let exact = peak_od_closed_form(n, &g, &s);
        let v = peak_od(n, &g, &s, &q).unwrap();
        assert!(((v - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn absorption_limits() {
        let (d, g, s, q) = setup();
        assert_eq!(absorption(0.0, &d, &g, &s, &q).unwrap(), 0.0);
        let far = d.with_detuning(1e5);
        let a = absorption(228.0, &far, &g, &s, &q).unwrap();
        assert!((a * 4.0 * 1e10 / 228.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decoherence_and_gain() {
        let s = AtomSpecies { gamma: 1.0, gamma0: 0.057, ..AtomSpecies::rb87_d1() };
        assert_eq!(decoherence(&s, 0.0, 0.0), 0.057);
        let rate = 45e3 / 5.75e6;
        let gamma = decoherence(&s, 0.1516, rate);
        assert!((gamma - 0.2165).abs() < 2e-4);
        assert!(decoherence(&s, 0.2, rate) > gamma && decoherence(&s, 0.1516, 2.0 * rate) > gamma);
        assert_eq!(stokes_gain(0.0, rate, gamma).unwrap(), 0.0);
        let gs = stokes_gain(228.25, rate, gamma).unwrap();
        assert!((gs - 16.5).abs() < 0.5);
        assert_eq!(stokes_gain(2.0 * 228.25, rate, gamma).unwrap(), 2.0 * gs);
        assert!(stokes_gain(1.0, rate, 0.0).is_err());
    }

    #[test]
    fn attenuation_sum() {
        assert_eq!(attenuation(0.15, 0.0, 16.5), 0.15);
        assert!((attenuation(0.15, 0.07, 16.5) - 1.305).abs() < 1e-12);
        assert!(attenuation(0.15, 0.08, 16.5) > attenuation(0.15, 0.07, 16.5));
    }

    #[test]
    fn effective_rate_without_attenuation() {
        let (d, g, s, q) = setup();
        let n = 8.3e4;
        let r0 = radial_mean_rate(&d, &g, &s, &q).unwrap();
        let eff = effective_collective_rate(n, &d, &g, &s, 0.0, &q).unwrap();
        assert_eq!(eff, g.mu * n * r0);
        assert_eq!(effective_collective_rate(0.0, &d, &g, &s, 1.3, &q).unwrap(), 0.0);
        // the nested path agrees with the shortcut at a vanishing attenuation
        let nested = longitudinal_mean_rate(&d, &g, &s, 1e-300, &q).unwrap();
        assert!(((nested - r0) / r0).abs() < 1e-10);
    }

    #[test]
    fn shadow_factor_stark_free() {
        // Δ_p ≫ Ω_p: S ≈ 0 so the z-integral gives (1 − e^(−α̃))/α̃
        let (_, g, s, q) = setup();
        let d = DriveConfig::new(0.01, 1e3, 130e-9).unwrap();
        let n = 1e4;
        let r0 = radial_mean_rate(&d, &g, &s, &q).unwrap();
        let eff = effective_collective_rate(n, &d, &g, &s, 1.0, &q).unwrap();
        let eta = shadow_factor(eff, n, g.mu, r0).unwrap();
        assert!((eta - (1.0 - (-1.0f64).exp())).abs() < 0.01 * 0.632);
        let deep = effective_collective_rate(n, &d, &g, &s, 200.0, &q).unwrap();
        let eta_deep = shadow_factor(deep, n, g.mu, r0).unwrap();
        assert!(eta_deep > 0.0 && eta_deep < 0.01);
        assert!(shadow_factor(1.0, 0.0, g.mu, r0).is_err());
    }
}
