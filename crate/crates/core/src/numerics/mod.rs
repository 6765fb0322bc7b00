//! Numerical primitives shared by the model, trace analysis and calibration.

mod minimize;
mod quadrature;
mod regression;
mod stats;

pub use minimize::{find_root, minimize_scalar, Minimum};
pub use quadrature::{integrate, integrate_detailed, integrate_semi_infinite, Quadrature, QuadratureSpec};
pub use regression::{linfit, LinFitResult};
pub use stats::{summary_stats, SampleStats};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: estimate {estimate:e} with error bound {error_bound:e}")]
    NotConverged { estimate: f64, error_bound: f64 },
    #[error("integrand or objective is not finite at x = {x:e}")]
    NonFinite { x: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("max_subdivisions must be at least 1")]
    InvalidSubdivisions,
    #[error("invalid substitution scale {0}")]
    InvalidScale(f64),
    #[error("minimum lies on the bracket boundary at x = {x} (value {value:e})")]
    BoundaryMinimum { x: f64, value: f64 },
    #[error("function values at {lo} and {hi} do not bracket a root")]
    NotBracketed { lo: f64, hi: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all abscissae are equal")]
    DegenerateDesign,
    #[error("weights must be positive and finite, got {0}")]
    InvalidWeight(f64),
    #[error("input data contains non-finite values")]
    NonFiniteData,
}
