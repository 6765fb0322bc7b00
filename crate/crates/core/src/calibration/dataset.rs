use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CalibrationError;

/// Mean delay of one (N, Δ_p) setting. Times in seconds, Δ_p in units of Γ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayPoint {
    pub n_atoms: f64,
    #[serde(rename = "delta_p_gamma")]
    pub delta_p: f64,
    #[serde(rename = "mean_t_d_s")]
    pub mean_t_d: f64,
    #[serde(rename = "std_t_d_s")]
    pub std_t_d: f64,
    pub n_shots: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DelayDataset {
    pub points: Vec<DelayPoint>,
}

impl DelayDataset {
    pub fn new(points: Vec<DelayPoint>) -> Result<Self, CalibrationError> {
        for (i, p) in points.iter().enumerate() {
            let bad = |what: &str| Err(CalibrationError::Dataset(format!("point {i}: {what}")));
            if !(p.mean_t_d > 0.0 && p.mean_t_d.is_finite()) {
                return bad("mean_t_d must be positive");
            }
            if !(p.std_t_d >= 0.0 && p.std_t_d.is_finite()) {
                return bad("std_t_d must be non-negative");
            }
            if !(p.n_atoms > 1.0 && p.n_atoms.is_finite()) {
                return bad("n_atoms must exceed 1");
            }
            if p.delta_p == 0.0 || !p.delta_p.is_finite() {
                return bad("delta_p must be finite and non-zero");
            }
            if p.n_shots == 0 {
                return bad("n_shots must be at least 1");
            }
        }
        Ok(Self { points })
    }

    /// Reads `n_atoms,delta_p_gamma,mean_t_d_s,std_t_d_s,n_shots`; `#` lines
    /// are comments.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, CalibrationError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let points = rdr
            .deserialize()
            .collect::<Result<Vec<DelayPoint>, _>>()
            .map_err(|e| CalibrationError::Dataset(e.to_string()))?;
        Self::new(points)
    }

    pub fn read_csv(path: &Path) -> Result<Self, CalibrationError> {
        let f = std::fs::File::open(path).map_err(|e| CalibrationError::Dataset(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(std::io::BufReader::new(f))
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.points {
            w.serialize(p).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    /// Distinct detunings in ascending order.
    pub fn detunings(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.points.iter().map(|p| p.delta_p).collect();
        d.sort_by(f64::total_cmp);
        d.dedup_by(|a, b| same_detuning(*a, *b));
        d
    }

    pub fn at_detuning(&self, delta_p: f64) -> Vec<DelayPoint> {
        self.points.iter().filter(|p| same_detuning(p.delta_p, delta_p)).copied().collect()
    }
}

pub(crate) fn same_detuning(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}
