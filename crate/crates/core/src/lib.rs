//! Maximum-cooperation-number (MCN) model of collective decay in
//! inhomogeneous, optically dense ensembles, together with the burst-trace
//! analysis and β-calibration pipeline built on top of it.
//!
//! Module map:
//! - [`numerics`]: quadrature, 1-D minimization, root finding, regression, statistics
//! - [`model`]: scattering rate, Stark shift, radial averages, attenuation and the MCN
//! - [`traces`]: time-zero alignment, burst detection, sech² fitting, shot aggregation
//! - [`synth`]: deterministic synthetic shot generator and independent delay oracle
//! - [`calibration`]: β fitting, the linear β(Δp) law, scaling fits and MCN maps
//! - [`cli`]: manifest-driven batch commands behind the `mcn` binary

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod model;
pub mod numerics;
pub mod synth;
pub mod traces;
