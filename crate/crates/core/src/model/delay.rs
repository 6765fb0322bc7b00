//! Delay law of a homogeneous pencil-shaped ensemble and the two routes from
//! burst observables back to a collective decay rate.

use std::f64::consts::PI;

use super::ModelError;

fn log_factor(n_atoms: f64) -> Result<f64, ModelError> {
    if !(n_atoms > 1.0) || !n_atoms.is_finite() {
        return Err(ModelError::AtomNumberTooSmall(n_atoms));
    }
    let l = (2.0 * PI * n_atoms).sqrt().ln();
    Ok(l * l)
}

/// ⟨t_D⟩ = [ln√(2πN)]²/(4·N_c·Γ_R).
///
/// `n_prefactor` is the cooperative number in the prefactor (μN or N_mc);
/// the logarithm always takes the bare atom number.
pub fn mean_delay(n_prefactor: f64, rate: f64, n_atoms: f64) -> Result<f64, ModelError> {
    if !(n_prefactor > 0.0) {
        return Err(ModelError::InvalidParameter { name: "n_prefactor", value: n_prefactor });
    }
    if !(rate > 0.0) {
        return Err(ModelError::InvalidParameter { name: "rate", value: rate });
    }
    Ok(log_factor(n_atoms)? / (4.0 * n_prefactor * rate))
}

/// Γ_N = [ln√(2πN)]²/(4⟨t_D⟩).
pub fn gamma_n_from_delay(t_d: f64, n_atoms: f64) -> Result<f64, ModelError> {
    if !(t_d > 0.0) {
        return Err(ModelError::InvalidParameter { name: "t_d", value: t_d });
    }
    Ok(log_factor(n_atoms)? / (4.0 * t_d))
}

/// Small-sample width relation Γ_N = 3.5/τ_b (τ_b = FWHM of the first burst).
pub fn gamma_n_from_width(tau_b: f64) -> Result<f64, ModelError> {
    if !(tau_b > 0.0) {
        return Err(ModelError::InvalidParameter { name: "tau_b", value: tau_b });
    }
    Ok(3.5 / tau_b)
}

/// Diagnostic ratio of the delay-based to the width-based Γ_N.
pub fn delay_to_width_rate_ratio(t_d: f64, tau_b: f64, n_atoms: f64) -> Result<f64, ModelError> {
    Ok(gamma_n_from_delay(t_d, n_atoms)? / gamma_n_from_width(tau_b)?)
}

/// Relative shot-to-shot delay spread from vacuum initiation, 2.6/ln N.
pub fn delay_jitter_rel(n_atoms: f64) -> Result<f64, ModelError> {
    if !(n_atoms > 1.0) {
        return Err(ModelError::AtomNumberTooSmall(n_atoms));
    }
    Ok(2.6 / n_atoms.ln())
}
