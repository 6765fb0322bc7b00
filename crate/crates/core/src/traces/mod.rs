//! Shot-trace analysis: the t = 0 convention, burst detection, sech² fits
//! and per-run statistics.

mod aggregate;
mod align;
mod detect;
mod fit;
mod trace;

pub use aggregate::{analyze_shot, shot_statistics, DominantShape, ShotStatistics};
pub use align::{align_time_zero, plateau_mean};
pub use detect::{detect_bursts, moving_average, DetectConfig, Interval};
pub use fit::{fit_burst, BurstFeatures, FitQuality, MIN_FIT_SAMPLES, SECH2_FWHM};
pub use trace::{Trace, TraceMeta, MIN_SAMPLES};

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("time and power columns differ in length ({times} vs {powers})")]
    LengthMismatch { times: usize, powers: usize },
    #[error("trace has {0} samples, at least {min} required", min = MIN_SAMPLES)]
    TooShort(usize),
    #[error("trace contains non-finite values")]
    NonFinite,
    #[error("sampling is not uniform at sample {index}")]
    NonUniform { index: usize },
    #[error("missing column {0}")]
    MissingColumn(&'static str),
    #[error("power_v column requires a volts_per_watt conversion")]
    MissingConversion,
    #[error("unparseable record at line {line}")]
    BadRecord { line: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("pump reference never crosses half of its plateau")]
    NoCrossing,
    #[error("fit interval holds {0} samples, at least {min} required", min = MIN_FIT_SAMPLES)]
    IntervalTooShort(usize),
    #[error("burst window has no positive signal")]
    NoSignal,
    #[error("no shots to aggregate")]
    NoShots,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl From<csv::Error> for TraceError {
    fn from(e: csv::Error) -> Self {
        TraceError::Csv(e.to_string())
    }
}
