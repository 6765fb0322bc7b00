//! C ABI over `mcn-core`.
//!
//! Every function returns an [`McnStatus`]; on failure a message can be read
//! with [`mcn_last_error_message`] from the same thread. Models are opaque
//! handles created by [`mcn_model_new`] and released by [`mcn_model_free`].
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mcn_core::model::{gamma_n_from_delay, mcn, mean_delay, AtomSpecies, DriveConfig, EnsembleGeometry};
use mcn_core::numerics::QuadratureSpec;
use mcn_core::traces::{fit_burst, FitQuality, Interval, Trace};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ModelFailure = 3,
    FitFailure = 4,
    Panic = 5,
}

/// Species and geometry in SI units (rad/s, m, m²) plus the attenuation
/// scaling factor β.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct McnModelParams {
    pub gamma_rad_s: f64,
    pub lambda_m: f64,
    pub branching: f64,
    pub sigma13_m2: f64,
    pub gamma0_rad_s: f64,
    pub sigma_a_m: f64,
    pub sigma_p_m: f64,
    pub length_m: f64,
    pub core_radius_m: f64,
    pub beta: f64,
}

/// MCN breakdown at one operating point. Rates in rad/s, delay in s.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct McnResult {
    pub mean_rate_r: f64,
    pub delta_s: f64,
    pub delta_rate: f64,
    pub eta_inh: f64,
    pub alpha0: f64,
    pub alpha_tilde: f64,
    pub eta_s: f64,
    pub n_mu: f64,
    pub n_mc: f64,
    pub mean_delay: f64,
}

/// Features of one fitted burst; `converged` is 0 when the raw fallback
/// was used.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct McnBurst {
    pub t_d: f64,
    pub p_s: f64,
    pub tau_b: f64,
    pub t_d_raw: f64,
    pub fit_rms: f64,
    pub converged: i32,
}

/// Opaque model handle.
pub struct McnModel {
    species: AtomSpecies,
    geom: EnsembleGeometry,
    beta: f64,
    quad: QuadratureSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard<F: FnOnce() -> Result<(), (McnStatus, String)>>(f: F) -> McnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => McnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            McnStatus::Panic
        }
    }
}

fn null(what: &str) -> (McnStatus, String) {
    (McnStatus::NullPointer, format!("{what} is null"))
}

/// Creates a model from explicit parameters.
///
/// # Safety
/// `params` must point to a valid `McnModelParams` and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mcn_model_new(params: *const McnModelParams, out: *mut *mut McnModel) -> McnStatus {
    guard(|| {
        let p = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let invalid = |e: mcn_core::model::ModelError| (McnStatus::InvalidArgument, e.to_string());
        let species = AtomSpecies::new(p.gamma_rad_s, p.lambda_m, p.branching, p.sigma13_m2, p.gamma0_rad_s).map_err(invalid)?;
        let geom = EnsembleGeometry::new(p.sigma_a_m, p.sigma_p_m, p.length_m, p.core_radius_m, p.lambda_m).map_err(invalid)?;
        if !(p.beta >= 0.0 && p.beta.is_finite()) {
            return Err((McnStatus::InvalidArgument, format!("beta = {} must be non-negative", p.beta)));
        }
        let model = Box::new(McnModel { species, geom, beta: p.beta, quad: QuadratureSpec::default() });
        unsafe { *out = Box::into_raw(model) };
        Ok(())
    })
}

/// Fills `out` with the reference parameters: ⁸⁷Rb D1 in a hollow-core
/// fiber with β = 0.07.
///
/// # Safety
/// `out` must point to writable storage for one `McnModelParams`.
#[no_mangle]
pub unsafe extern "C" fn mcn_model_params_reference(out: *mut McnModelParams) -> McnStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let s = AtomSpecies::rb87_d1();
        let g = EnsembleGeometry::hollow_core_fiber();
        *out = McnModelParams {
            gamma_rad_s: s.gamma,
            lambda_m: s.lambda,
            branching: s.branching,
            sigma13_m2: s.sigma13,
            gamma0_rad_s: s.gamma0,
            sigma_a_m: g.sigma_a,
            sigma_p_m: g.sigma_p,
            length_m: g.length,
            core_radius_m: g.core_radius,
            beta: 0.07,
        };
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from [`mcn_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mcn_model_free(model: *mut McnModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Evaluates the MCN pipeline. Ω_p⁽⁰⁾ and Δ_p in units of Γ, τ_p in s.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcn_model_evaluate(
    model: *const McnModel,
    n_atoms: f64,
    omega_p0_gamma: f64,
    delta_p_gamma: f64,
    tau_p_s: f64,
    out: *mut McnResult,
) -> McnStatus {
    guard(|| {
        let m = unsafe { model.as_ref() }.ok_or_else(|| null("model"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let drive =
            DriveConfig::new(omega_p0_gamma, delta_p_gamma, tau_p_s).map_err(|e| (McnStatus::InvalidArgument, e.to_string()))?;
        let b = mcn(n_atoms, &drive, &m.geom, &m.species, m.beta, &m.quad).map_err(|e| (McnStatus::ModelFailure, e.to_string()))?;
        let delay = mean_delay(b.n_mc, b.mean_rate_r, n_atoms).map_err(|e| (McnStatus::ModelFailure, e.to_string()))?;
        *out = McnResult {
            mean_rate_r: b.mean_rate_r,
            delta_s: b.delta_s,
            delta_rate: b.delta_rate,
            eta_inh: b.eta_inh,
            alpha0: b.alpha0,
            alpha_tilde: b.alpha_tilde,
            eta_s: b.eta_s,
            n_mu: b.n_mu,
            n_mc: b.n_mc,
            mean_delay: delay,
        };
        Ok(())
    })
}

/// ⟨t_D⟩ = [ln√(2πN)]²/(4·N_c·Γ_R).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcn_mean_delay(n_prefactor: f64, rate: f64, n_atoms: f64, out: *mut f64) -> McnStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = mean_delay(n_prefactor, rate, n_atoms).map_err(|e| (McnStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Γ_N = [ln√(2πN)]²/(4⟨t_D⟩).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcn_gamma_n_from_delay(t_d: f64, n_atoms: f64, out: *mut f64) -> McnStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = gamma_n_from_delay(t_d, n_atoms).map_err(|e| (McnStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Fits A·sech²((t − t₀)/τ) + b to samples `[start, end)` of a uniformly
/// sampled trace.
///
/// # Safety
/// `t` and `p` must each point to `len` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mcn_fit_burst(
    t: *const f64,
    p: *const f64,
    len: usize,
    start: usize,
    end: usize,
    t_zero: f64,
    out: *mut McnBurst,
) -> McnStatus {
    guard(|| {
        if t.is_null() {
            return Err(null("t"));
        }
        if p.is_null() {
            return Err(null("p"));
        }
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let (ts, ps) = unsafe { (std::slice::from_raw_parts(t, len), std::slice::from_raw_parts(p, len)) };
        if !(start < end && end <= len) {
            return Err((McnStatus::InvalidArgument, format!("interval [{start}, {end}) outside 0..{len}")));
        }
        let trace = Trace::new(ts.to_vec(), ps.to_vec()).map_err(|e| (McnStatus::InvalidArgument, e.to_string()))?;
        let f = fit_burst(&trace, Interval { start, end }, t_zero).map_err(|e| (McnStatus::FitFailure, e.to_string()))?;
        *out = McnBurst {
            t_d: f.t_d,
            p_s: f.p_s,
            tau_b: f.tau_b,
            t_d_raw: f.t_d_raw,
            fit_rms: f.fit_rms,
            converged: i32::from(f.quality == FitQuality::Converged),
        };
        Ok(())
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `buf_len`, into `buf`. Returns the buffer size needed for
/// the full message, or 0 when no error is recorded. `buf` may be null to
/// query the size.
///
/// # Safety
/// `buf` must be null or point to `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mcn_last_error_message(buf: *mut c_char, buf_len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && buf_len > 0 {
            let n = bytes.len().min(buf_len);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n - 1) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mcn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
