//! Single-atom rates, the pump profile, and density-weighted radial moments.

use crate::numerics::{integrate_semi_infinite, QuadratureSpec};

use super::types::{AtomSpecies, DriveConfig, EnsembleGeometry};
use super::ModelError;

/// Ground-state AC Stark shift S = Ω_p²/(4Δ_p). Signed: negative for red
/// detuning.
pub fn stark_shift(omega_p: f64, delta_p: f64) -> Result<f64, ModelError> {
    if delta_p == 0.0 {
        return Err(ModelError::ZeroDetuning);
    }
    Ok(omega_p * omega_p / (4.0 * delta_p))
}

/// Raman scattering rate Γ_R = R_B·Γ·Ω_p²/(4Δ²) with the Stark-shifted
/// detuning Δ = Δ_p + 2S. All frequencies share the unit of `species.gamma`.
pub fn scattering_rate(omega_p: f64, delta_p: f64, species: &AtomSpecies) -> Result<f64, ModelError> {
    let shifted = delta_p + 2.0 * stark_shift(omega_p, delta_p)?;
    if shifted == 0.0 {
        return Err(ModelError::VanishingEffectiveDetuning);
    }
    Ok(species.branching * species.gamma * omega_p * omega_p / (4.0 * shifted * shifted))
}

/// Pump Rabi frequency Ω_p(r, z') = Ω_p⁽⁰⁾·exp(−r²/σ_p²)·exp(−α̃z'/2), in the
/// species' rate unit.
pub fn pump_rabi(
    r: f64,
    z_prime: f64,
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    alpha_tilde: f64,
) -> f64 {
    debug_assert!(r >= 0.0 && (0.0..=1.0).contains(&z_prime));
    let radial = (-(r * r) / (geom.sigma_p * geom.sigma_p)).exp();
    drive.omega_abs(species) * radial * (-0.5 * alpha_tilde * z_prime).exp()
}

/// Density-weighted radial mean ⟨f⟩_r = (2/σ_a²)∫₀^∞ r·e^(−r²/σ_a²)·f(r) dr.
///
/// Integrated in ρ = r/σ_a on [0, ∞) with the semi-infinite map scaled by
/// max(1, σ_p/σ_a).
pub fn radial_average<F: Fn(f64) -> f64>(f: F, geom: &EnsembleGeometry, quad: &QuadratureSpec) -> Result<f64, ModelError> {
    let sa = geom.sigma_a;
    let scale = (geom.sigma_p / sa).max(1.0);
    let weighted = |rho: f64| {
        let w = (-rho * rho).exp();
        if w == 0.0 {
            0.0
        } else {
            2.0 * rho * w * f(sa * rho)
        }
    };
    Ok(integrate_semi_infinite(weighted, 0.0, scale, quad)?)
}

/// Fallible variant of [`radial_average`]: the first error raised by `f`
/// aborts the integration.
pub(crate) fn try_radial_average<F>(f: F, geom: &EnsembleGeometry, quad: &QuadratureSpec) -> Result<f64, ModelError>
where
    F: Fn(f64) -> Result<f64, ModelError>,
{
    let failure = std::cell::RefCell::new(None);
    let value = radial_average(
        |r| match f(r) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        geom,
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    value
}

fn rate_at(r: f64, drive: &DriveConfig, geom: &EnsembleGeometry, species: &AtomSpecies) -> Result<f64, ModelError> {
    let omega = pump_rabi(r, 0.0, drive, geom, species, 0.0);
    scattering_rate(omega, drive.delta_abs(species), species)
}

fn stark_at(r: f64, drive: &DriveConfig, geom: &EnsembleGeometry, species: &AtomSpecies) -> Result<f64, ModelError> {
    let omega = pump_rabi(r, 0.0, drive, geom, species, 0.0);
    stark_shift(omega, drive.delta_abs(species))
}

/// ⟨Γ_R(r, z'=0)⟩_r including the radially varying Stark shift.
pub fn radial_mean_rate(
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    quad: &QuadratureSpec,
) -> Result<f64, ModelError> {
    try_radial_average(|r| rate_at(r, drive, geom, species), geom, quad)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialQuantity {
    Stark,
    Rate,
}

/// Radial standard deviation δf = sqrt(⟨(f − ⟨f⟩_r)²⟩_r) of the Stark shift
/// or the scattering rate at the entrance face.
pub fn radial_std(
    quantity: RadialQuantity,
    drive: &DriveConfig,
    geom: &EnsembleGeometry,
    species: &AtomSpecies,
    quad: &QuadratureSpec,
) -> Result<f64, ModelError> {
    let f = |r: f64| match quantity {
        RadialQuantity::Stark => stark_at(r, drive, geom, species),
        RadialQuantity::Rate => rate_at(r, drive, geom, species),
    };
    let mean = try_radial_average(f, geom, quad)?;
    // f − ⟨f⟩ carries rounding of order ε|f|, so a nearly uniform f cannot
    // meet a purely relative target; resolve δf to rel_tol·|⟨f⟩| instead.
    let floor = (quad.rel_tol * mean).powi(2);
    let var_quad = QuadratureSpec { abs_tol: quad.abs_tol.max(floor), ..*quad };
    let var = try_radial_average(|r| f(r).map(|v| (v - mean) * (v - mean)), geom, &var_quad)?;
    Ok(var.max(0.0).sqrt())
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
    fn stark_shift_values() {
        assert_eq!(stark_shift(0.0, 18.4).unwrap(), 0.0);
        let s = stark_shift(6.4, 18.4).unwrap();
        assert!((2.0 * s - 40.96 / 36.8).abs() < 1e-14);
        assert!((s - 0.5565).abs() < 1e-4);
        assert!((stark_shift(12.8, 18.4).unwrap() - 4.0 * s).abs() < 1e-14);
        assert!(stark_shift(6.4, -18.4).unwrap() < 0.0);
        assert!(matches!(stark_shift(1.0, 0.0), Err(ModelError::ZeroDetuning)));
    }

    #[test]
    fn scattering_rate_values() {
        let sp = AtomSpecies { gamma: 1.0, ..AtomSpecies::rb87_d1() };
        assert_eq!(scattering_rate(0.0, 18.4, &sp).unwrap(), 0.0);
        let delta = 18.4 + 40.96 / 36.8;
        let expected = 0.5 * 40.96 / (4.0 * delta * delta);
        let g = scattering_rate(6.4, 18.4, &sp).unwrap();
        assert!((g - expected).abs() < 1e-15);
        assert!((g - 0.013447).abs() < 1e-6);
        assert_eq!(g, scattering_rate(6.4, -18.4, &sp).unwrap());
    }

    #[test]
    fn pump_profile() {
        let (d, g, s, _) = setup();
        let o0 = d.omega_abs(&s);
        assert_eq!(pump_rabi(0.0, 0.0, &d, &g, &s, 0.0), o0);
        assert!((pump_rabi(g.sigma_p, 0.0, &d, &g, &s, 0.0) - o0 / std::f64::consts::E).abs() < 1e-12 * o0);
        let z1 = pump_rabi(0.0, 1.0, &d, &g, &s, 1.308) / o0;
        assert!((z1 - (-0.654f64).exp()).abs() < 1e-15);
        assert!((z1 - 0.5200).abs() < 1e-4);
    }

    #[test]
    fn radial_average_closed_forms() {
        let (_, g, _, q) = setup();
        assert!((radial_average(|_| 3.25, &g, &q).unwrap() - 3.25).abs() < 1e-12);
        let sp2 = g.sigma_p * g.sigma_p;
        let sa2 = g.sigma_a * g.sigma_a;
        let g2 = radial_average(|r| (-2.0 * r * r / sp2).exp(), &g, &q).unwrap();
        let g4 = radial_average(|r| (-4.0 * r * r / sp2).exp(), &g, &q).unwrap();
        assert!((g2 - sp2 / (sp2 + 2.0 * sa2)).abs() < 1e-10);
        assert!((g4 - sp2 / (sp2 + 4.0 * sa2)).abs() < 1e-10);
        assert!((g2 - 0.56680).abs() < 1e-5);
        assert!((g4 - 0.39548).abs() < 1e-5);
    }

    #[test]
    fn mean_rate_operating_point() {
        let (d, g, s, q) = setup();
        let rate = radial_mean_rate(&d, &g, &s, &q).unwrap();
        let target = 2.0 * std::f64::consts::PI * 45e3;
        assert!(((rate - target) / target).abs() < 0.15, "{}", rate / target);
        let dark = DriveConfig { omega_p0: 0.0, ..d };
        assert_eq!(radial_mean_rate(&dark, &g, &s, &q).unwrap(), 0.0);
    }

    #[test]
    fn uniform_pump_limit() {
        let (d, g0, s, q) = setup();
        let g = EnsembleGeometry { sigma_p: 1e3 * g0.sigma_a, ..g0 };
        let on_axis = scattering_rate(d.omega_abs(&s), d.delta_abs(&s), &s).unwrap();
        let rate = radial_mean_rate(&d, &g, &s, &q).unwrap();
        assert!(((rate - on_axis) / on_axis).abs() < 1e-3);
        assert!(radial_std(RadialQuantity::Stark, &d, &g, &s, &q).unwrap() < 1e-3 * on_axis * 40.0);
    }

    #[test]
    fn stark_spread_closed_form() {
        let (d, g, s, q) = setup();
        let sp2 = g.sigma_p * g.sigma_p;
        let sa2 = g.sigma_a * g.sigma_a;
        let (g2, g4) = (sp2 / (sp2 + 2.0 * sa2), sp2 / (sp2 + 4.0 * sa2));
        let s0 = stark_shift(d.omega_abs(&s), d.delta_abs(&s)).unwrap();
        let exact = s0 * (g4 - g2 * g2).sqrt();
        let ds = radial_std(RadialQuantity::Stark, &d, &g, &s, &q).unwrap();
        assert!(((ds - exact) / exact).abs() < 1e-8, "{}", (ds - exact) / exact);
        assert!((ds / s.gamma - 0.1516).abs() < 1e-4);
        let d2 = DriveConfig { omega_p0: 2.0 * d.omega_p0, ..d };
        let ds2 = radial_std(RadialQuantity::Stark, &d2, &g, &s, &q).unwrap();
        assert!((ds2 / ds - 4.0).abs() < 1e-8);
    }
}
