//! Run manifest: JSON with fixed units per field and no unknown keys.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calibration::{BetaChoice, BetaLaw, CalibContext, MapGrid};
use crate::model::{AtomSpecies, DriveConfig, EnsembleGeometry};
use crate::numerics::QuadratureSpec;
use crate::traces::DetectConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesBlock {
    /// Γ/2π in MHz.
    pub gamma_mhz: f64,
    pub lambda_nm: f64,
    pub branching: f64,
    pub sigma13_cm2: f64,
    /// γ₀ in units of Γ.
    pub gamma0_gamma: f64,
}

impl Default for SpeciesBlock {
    fn default() -> Self {
        Self { gamma_mhz: 5.75, lambda_nm: 795.0, branching: 0.5, sigma13_cm2: 5.763e-10, gamma0_gamma: 0.057 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub sigma_a_um: f64,
    pub sigma_p_um: f64,
    pub length_cm: f64,
    pub core_radius_um: f64,
    /// Overrides NA = λ/(πσ_p) when present.
    #[serde(default)]
    pub numerical_aperture: Option<f64>,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        Self { sigma_a_um: 1.7, sigma_p_um: 2.75, length_cm: 3.0, core_radius_um: 3.75, numerical_aperture: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveBlock {
    pub omega_p0_gamma: f64,
    pub delta_p_gamma: f64,
    pub tau_p_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum BetaBlock {
    Fixed { beta: f64 },
    Law { intercept: f64, slope_per_gamma: f64, valid_min_detuning_gamma: f64 },
}

impl BetaBlock {
    pub fn choice(&self) -> BetaChoice {
        match *self {
            BetaBlock::Fixed { beta } => BetaChoice::Fixed { beta },
            BetaBlock::Law { intercept, slope_per_gamma, valid_min_detuning_gamma } => BetaChoice::Law(BetaLaw {
                intercept,
                slope: slope_per_gamma,
                valid_min_detuning: valid_min_detuning_gamma,
            }),
        }
    }
}

impl Default for BetaBlock {
    fn default() -> Self {
        BetaBlock::Fixed { beta: 0.07 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for ToleranceBlock {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self { quad_rel_tol: q.rel_tol, quad_abs_tol: q.abs_tol, max_subdivisions: q.max_subdivisions }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub n_atoms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectBlock {
    pub min_prominence_sigma: f64,
    pub smoothing_ns: f64,
    pub noise_fraction: f64,
}

impl Default for DetectBlock {
    fn default() -> Self {
        let d = DetectConfig::default();
        Self { min_prominence_sigma: d.min_prominence_sigma, smoothing_ns: d.smoothing_time * 1e9, noise_fraction: d.noise_fraction }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeBlock {
    /// Directory holding `<run_id>_pump.csv` and `<run_id>_shot<k>.csv`.
    pub data_dir: PathBuf,
    pub run_id: String,
    #[serde(default)]
    pub volts_per_watt: Option<f64>,
    #[serde(default)]
    pub detection: DetectBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthBlock {
    pub run_id: String,
    pub n_atoms: f64,
    /// Index into `drives`.
    #[serde(default)]
    pub drive: usize,
    pub snr: f64,
    #[serde(default)]
    pub ringing_ratio: f64,
    #[serde(default = "default_ringing_gap")]
    pub ringing_gap: f64,
    pub n_shots: usize,
    pub dt_ns: f64,
    #[serde(default)]
    pub jitter_rel: Option<f64>,
    #[serde(default = "default_peak_power")]
    pub peak_power_per_mc2_w: f64,
    #[serde(default = "default_pump_power")]
    pub pump_power_w: f64,
    #[serde(default = "default_pump_noise")]
    pub pump_noise_rel: f64,
}

fn default_ringing_gap() -> f64 {
    5.0
}
fn default_peak_power() -> f64 {
    1e-10
}
fn default_pump_power() -> f64 {
    1e-3
}
fn default_pump_noise() -> f64 {
    0.01
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateBlock {
    pub dataset: PathBuf,
    #[serde(default = "default_min_detuning")]
    pub min_detuning_gamma: f64,
}

fn default_min_detuning() -> f64 {
    6.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapBlock {
    pub n_mu_min: f64,
    pub n_mu_max: f64,
    pub n_mu_points: usize,
    pub delta_min_gamma: f64,
    pub delta_max_gamma: f64,
    pub delta_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    #[serde(default)]
    pub species: SpeciesBlock,
    #[serde(default)]
    pub geometry: GeometryBlock,
    pub drives: Vec<DriveBlock>,
    #[serde(default)]
    pub beta: BetaBlock,
    #[serde(default)]
    pub tolerances: ToleranceBlock,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model: Option<ModelBlock>,
    #[serde(default)]
    pub analyze: Option<AnalyzeBlock>,
    #[serde(default)]
    pub synth: Option<SynthBlock>,
    #[serde(default)]
    pub calibrate: Option<CalibrateBlock>,
    #[serde(default)]
    pub map: Option<MapBlock>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest {0}: {1}")]
    Io(String, String),
    #[error("manifest: {0}")]
    Parse(String),
    #[error("manifest field {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("manifest has no `{0}` block")]
    MissingBlock(&'static str),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ManifestError {
    ManifestError::Invalid { field, message: message.into() }
}

/// A parsed manifest with its SHA-256 and the directory relative paths are
/// resolved against.
#[derive(Clone, Debug)]
pub struct LoadedManifest {
    pub manifest: RunManifest,
    pub sha256: String,
    pub base_dir: PathBuf,
}

impl LoadedManifest {
    pub fn from_path(path: &Path) -> Result<Self, ManifestError> {
        let bytes = std::fs::read(path).map_err(|e| ManifestError::Io(path.display().to_string(), e.to_string()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_bytes(&bytes, base)
    }

    pub fn from_bytes(bytes: &[u8], base_dir: PathBuf) -> Result<Self, ManifestError> {
        let manifest: RunManifest = serde_json::from_slice(bytes).map_err(|e| ManifestError::Parse(e.to_string()))?;
        manifest.validate()?;
        Ok(Self { manifest, sha256: hex::encode(Sha256::digest(bytes)), base_dir })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

impl RunManifest {
    pub fn validate(&self) -> Result<(), ManifestError> {
        self.species()?;
        self.geometry()?;
        if self.drives.is_empty() {
            return Err(invalid("drives", "at least one drive is required"));
        }
        for d in &self.drives {
            DriveConfig::new(d.omega_p0_gamma, d.delta_p_gamma, d.tau_p_ns * 1e-9).map_err(|e| invalid("drives", e.to_string()))?;
        }
        if let BetaBlock::Fixed { beta } = self.beta {
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(invalid("beta", "beta must be non-negative"));
            }
        }
        self.quadrature()?;
        if let Some(s) = &self.synth {
            if s.drive >= self.drives.len() {
                return Err(invalid("synth.drive", format!("index {} out of range", s.drive)));
            }
            if !(s.dt_ns > 0.0) {
                return Err(invalid("synth.dt_ns", "must be positive"));
            }
            check_run_id("synth.run_id", &s.run_id)?;
        }
        if let Some(a) = &self.analyze {
            check_run_id("analyze.run_id", &a.run_id)?;
            if !(a.detection.smoothing_ns > 0.0) {
                return Err(invalid("analyze.detection.smoothing_ns", "must be positive"));
            }
            if !(a.detection.noise_fraction > 0.0 && a.detection.noise_fraction <= 1.0) {
                return Err(invalid("analyze.detection.noise_fraction", "must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    pub fn species(&self) -> Result<AtomSpecies, ManifestError> {
        let s = &self.species;
        let gamma = 2.0 * PI * s.gamma_mhz * 1e6;
        AtomSpecies::new(gamma, s.lambda_nm * 1e-9, s.branching, s.sigma13_cm2 * 1e-4, s.gamma0_gamma * gamma)
            .map_err(|e| invalid("species", e.to_string()))
    }

    pub fn geometry(&self) -> Result<EnsembleGeometry, ManifestError> {
        let g = &self.geometry;
        let (sa, sp, l, rc) = (g.sigma_a_um * 1e-6, g.sigma_p_um * 1e-6, g.length_cm * 1e-2, g.core_radius_um * 1e-6);
        match g.numerical_aperture {
            Some(na) => EnsembleGeometry::with_numerical_aperture(sa, sp, l, rc, na),
            None => EnsembleGeometry::new(sa, sp, l, rc, self.species.lambda_nm * 1e-9),
        }
        .map_err(|e| invalid("geometry", e.to_string()))
    }

    pub fn drive(&self, index: usize) -> DriveConfig {
        let d = &self.drives[index];
        DriveConfig { omega_p0: d.omega_p0_gamma, delta_p: d.delta_p_gamma, tau_p: d.tau_p_ns * 1e-9 }
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, ManifestError> {
        let t = &self.tolerances;
        QuadratureSpec::new(t.quad_rel_tol, t.quad_abs_tol, t.max_subdivisions).map_err(|e| invalid("tolerances", e.to_string()))
    }

    /// Model context from the first drive's Rabi frequency and rise time.
    pub fn calib_context(&self) -> Result<CalibContext, ManifestError> {
        let d = self.drive(0);
        Ok(CalibContext {
            species: self.species()?,
            geom: self.geometry()?,
            omega_p0: d.omega_p0,
            tau_p: d.tau_p,
            quad: self.quadrature()?,
        })
    }

    pub fn map_grid(&self) -> Result<MapGrid, ManifestError> {
        let m = self.map.as_ref().ok_or(ManifestError::MissingBlock("map"))?;
        Ok(MapGrid {
            n_mu_min: m.n_mu_min,
            n_mu_max: m.n_mu_max,
            n_mu_points: m.n_mu_points,
            delta_min: m.delta_min_gamma,
            delta_max: m.delta_max_gamma,
            delta_points: m.delta_points,
        })
    }
}

fn check_run_id(field: &'static str, id: &str) -> Result<(), ManifestError> {
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(invalid(field, format!("{id:?} must be non-empty [A-Za-z0-9_-]")));
    }
    Ok(())
}
