//! The five batch verbs. Each returns the files it wrote and how many rows
//! failed; hard failures are errors.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::calibration::{fit_beta_law, fit_beta_per_detuning, mcn_map, rate_collapse, BetaChoice, DelayDataset};
use crate::model::{mcn, mean_delay, McnBreakdown};
use crate::synth::{synth_shot_set, SynthSpec};
use crate::traces::{align_time_zero, analyze_shot, shot_statistics, BurstFeatures, DetectConfig, Trace};

use super::manifest::LoadedManifest;
use super::output::{fmt_f64, render_json, write_atomic, Provenance, Table};

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub row_failures: usize,
}

pub struct Ctx<'a> {
    pub loaded: &'a LoadedManifest,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub prov: Provenance,
}

impl Ctx<'_> {
    fn write(&self, outcome: &mut Outcome, name: &str, contents: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        write_atomic(&path, contents.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        outcome.files.push(path);
        Ok(())
    }
}

pub fn pump_file_name(run_id: &str) -> String {
    format!("{run_id}_pump.csv")
}

pub fn shot_file_name(run_id: &str, k: usize) -> String {
    format!("{run_id}_shot{k}.csv")
}

const MODEL_COLUMNS: &[&str] = &[
    "n_atoms",
    "omega_p0_gamma",
    "delta_p_gamma",
    "tau_p_ns",
    "beta",
    "n_mu",
    "mean_rate_r_rad_s",
    "delta_s_rad_s",
    "delta_rate_rad_s",
    "sigma_inh_rad_s",
    "eta_inh",
    "alpha0",
    "alpha_det",
    "gamma_dec_rad_s",
    "stokes_gain",
    "alpha_tilde",
    "eta_s",
    "n_mc",
    "relative_mcn",
    "mean_delay_s",
    "error",
];

/// Breakdown columns plus the delay, and the delay-law error if any.
fn breakdown_cells(b: &McnBreakdown) -> (Vec<String>, Option<String>) {
    let (delay, err) = match mean_delay(b.n_mc, b.mean_rate_r, b.n_atoms) {
        Ok(t) => (fmt_f64(t), None),
        Err(e) => (String::new(), Some(format!("delay law: {e}"))),
    };
    let cells = [
        b.n_mu,
        b.mean_rate_r,
        b.delta_s,
        b.delta_rate,
        b.sigma_inh,
        b.eta_inh,
        b.alpha0,
        b.alpha_det,
        b.gamma_dec,
        b.gain,
        b.alpha_tilde,
        b.eta_s,
        b.n_mc,
        b.relative_mcn(),
    ]
    .iter()
    .map(|v| fmt_f64(*v))
    .chain(std::iter::once(delay))
    .collect();
    (cells, err)
}

#[derive(Serialize)]
struct ModelRow {
    n_atoms: f64,
    drive: usize,
    delta_p_gamma: f64,
    breakdown: Option<McnBreakdown>,
    error: Option<String>,
}

/// One MCN breakdown per (drive, N); failing rows keep their stage-named
/// error in the `error` column.
pub fn cmd_model(ctx: &Ctx) -> Result<Outcome> {
    let m = &ctx.loaded.manifest;
    let n_list = m.model.as_ref().map(|b| b.n_atoms.clone()).unwrap_or_default();
    let species = m.species()?;
    let geom = m.geometry()?;
    let quad = m.quadrature()?;
    let beta = m.beta.choice();
    let jobs: Vec<(usize, f64)> = (0..m.drives.len()).flat_map(|d| n_list.iter().map(move |&n| (d, n))).collect();
    let rows: Vec<ModelRow> = jobs
        .par_iter()
        .map(|&(d, n)| {
            let drive = m.drive(d);
            let res = mcn(n, &drive, &geom, &species, beta.at(drive.delta_p), &quad);
            ModelRow {
                n_atoms: n,
                drive: d,
                delta_p_gamma: drive.delta_p,
                breakdown: res.as_ref().ok().copied(),
                error: res.err().map(|e| e.to_string()),
            }
        })
        .collect();

    let mut table = Table::new(MODEL_COLUMNS);
    let mut outcome = Outcome::default();
    for r in &rows {
        let drive = m.drive(r.drive);
        let mut cells = vec![
            fmt_f64(r.n_atoms),
            fmt_f64(drive.omega_p0),
            fmt_f64(drive.delta_p),
            fmt_f64(drive.tau_p * 1e9),
            fmt_f64(beta.at(drive.delta_p)),
        ];
        match (&r.breakdown, &r.error) {
            (Some(b), _) => {
                let (values, err) = breakdown_cells(b);
                cells.extend(values);
                if err.is_some() {
                    outcome.row_failures += 1;
                }
                cells.push(err.unwrap_or_default());
            }
            (None, err) => {
                cells.extend(std::iter::repeat_n(String::new(), MODEL_COLUMNS.len() - 6));
                cells.push(err.clone().unwrap_or_default());
                outcome.row_failures += 1;
            }
        }
        table.push(cells);
    }
    ctx.write(&mut outcome, "model.csv", &table.render(&ctx.prov))?;
    ctx.write(&mut outcome, "model.json", &render_json(&ctx.prov, "rows", &rows))?;
    Ok(outcome)
}

fn shot_files(dir: &Path, run_id: &str) -> Result<Vec<(usize, PathBuf)>> {
    let prefix = format!("{run_id}_shot");
    let mut shots = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if let Some(k) = name.strip_prefix(&prefix).and_then(|r| r.strip_suffix(".csv")).and_then(|k| k.parse().ok()) {
            shots.push((k, path));
        }
    }
    shots.sort();
    Ok(shots)
}

#[derive(Serialize)]
struct ShotRow {
    shot: usize,
    features: Option<BurstFeatures>,
    error: Option<String>,
}

/// Aligns t = 0 on the pump reference, fits every shot and aggregates the
/// successful ones. Shots without a burst stay in the feature table with an
/// error and count as row failures.
pub fn cmd_analyze(ctx: &Ctx) -> Result<Outcome> {
    let m = &ctx.loaded.manifest;
    let a = m.analyze.as_ref().context("manifest has no `analyze` block")?;
    let dir = ctx.loaded.resolve(&a.data_dir);
    let pump_path = dir.join(pump_file_name(&a.run_id));
    if !pump_path.exists() {
        bail!("missing pump reference {}", pump_path.display());
    }
    let pump = Trace::read_csv(&pump_path, a.volts_per_watt)?;
    let t_zero = align_time_zero(&pump)?;
    let shots = shot_files(&dir, &a.run_id)?;
    if shots.is_empty() {
        bail!("no shot files {}_shot<k>.csv in {}", a.run_id, dir.display());
    }
    let cfg = DetectConfig {
        min_prominence_sigma: a.detection.min_prominence_sigma,
        smoothing_time: a.detection.smoothing_ns * 1e-9,
        noise_fraction: a.detection.noise_fraction,
        ..DetectConfig::default()
    };
    let rows: Vec<ShotRow> = shots
        .par_iter()
        .map(|(k, path)| {
            let res = Trace::read_csv(path, a.volts_per_watt).and_then(|tr| analyze_shot(&tr, t_zero, &cfg));
            match res {
                Ok(Some(f)) => ShotRow { shot: *k, features: Some(f), error: None },
                Ok(None) => ShotRow { shot: *k, features: None, error: Some("no burst detected".into()) },
                Err(e) => ShotRow { shot: *k, features: None, error: Some(e.to_string()) },
            }
        })
        .collect();

    let mut outcome = Outcome::default();
    let mut table = Table::new(&[
        "shot",
        "t_d_s",
        "p_s_w",
        "tau_b_s",
        "t_d_raw_s",
        "n_bursts",
        "second_peak_ratio",
        "fit_rms_w",
        "quality",
        "error",
    ]);
    for r in &rows {
        let mut cells = vec![r.shot.to_string()];
        match &r.features {
            Some(f) => {
                cells.extend([f.t_d, f.p_s, f.tau_b, f.t_d_raw].map(fmt_f64));
                cells.push(f.n_bursts.to_string());
                cells.push(fmt_f64(f.second_peak_ratio));
                cells.push(fmt_f64(f.fit_rms));
                cells.push(serde_json::to_value(f.quality)?.as_str().unwrap_or_default().to_string());
                cells.push(String::new());
            }
            None => {
                cells.extend(std::iter::repeat_n(String::new(), 8));
                cells.push(r.error.clone().unwrap_or_default());
                outcome.row_failures += 1;
            }
        }
        table.push(cells);
    }
    let features: Vec<BurstFeatures> = rows.iter().filter_map(|r| r.features).collect();
    let stats = shot_statistics(&features).context("no shot yielded burst features")?;

    let mut st = Table::new(&[
        "run_id",
        "t_zero_s",
        "n_shots",
        "mean_t_d_s",
        "std_t_d_s",
        "stderr_t_d_s",
        "mean_p_s_w",
        "std_p_s_w",
        "mean_tau_b_s",
        "std_tau_b_s",
        "dominant_shape",
    ]);
    let mut cells = vec![a.run_id.clone(), fmt_f64(t_zero), stats.n_shots.to_string()];
    cells.extend(
        [stats.mean_t_d, stats.std_t_d, stats.stderr_t_d, stats.mean_p_s, stats.std_p_s, stats.mean_tau_b, stats.std_tau_b]
            .map(fmt_f64),
    );
    cells.push(serde_json::to_value(stats.dominant_shape)?.as_str().unwrap_or_default().to_string());
    st.push(cells);

    ctx.write(&mut outcome, &format!("{}_features.csv", a.run_id), &table.render(&ctx.prov))?;
    ctx.write(&mut outcome, &format!("{}_statistics.csv", a.run_id), &st.render(&ctx.prov))?;
    #[derive(Serialize)]
    struct Summary<'a> {
        run_id: &'a str,
        t_zero_s: f64,
        statistics: crate::traces::ShotStatistics,
        shots: &'a [ShotRow],
    }
    let summary = Summary { run_id: &a.run_id, t_zero_s: t_zero, statistics: stats, shots: &rows };
    ctx.write(&mut outcome, &format!("{}_analysis.json", a.run_id), &render_json(&ctx.prov, "analysis", &summary))?;
    Ok(outcome)
}

/// Writes a synthetic run: pump reference, one CSV per shot and the
/// generator truth.
pub fn cmd_synth(ctx: &Ctx) -> Result<Outcome> {
    let m = &ctx.loaded.manifest;
    let s = m.synth.as_ref().context("manifest has no `synth` block")?;
    let drive = m.drive(s.drive);
    let spec = SynthSpec {
        n_atoms: s.n_atoms,
        drive,
        geom: m.geometry()?,
        species: m.species()?,
        beta: m.beta.choice().at(drive.delta_p),
        snr: s.snr,
        ringing_ratio: s.ringing_ratio,
        ringing_gap: s.ringing_gap,
        n_shots: s.n_shots,
        seed: ctx.seed,
        dt: s.dt_ns * 1e-9,
        jitter_rel: s.jitter_rel,
        peak_power_per_mc2: s.peak_power_per_mc2_w,
        pump_power: s.pump_power_w,
        pump_noise_rel: s.pump_noise_rel,
        quad: m.quadrature()?,
    };
    let set = synth_shot_set(&spec)?;
    let mut outcome = Outcome::default();
    let header = ctx.prov.header_lines();
    let render = |tr: &Trace| -> Result<String> {
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &header)?;
        Ok(String::from_utf8(buf)?)
    };
    ctx.write(&mut outcome, &pump_file_name(&s.run_id), &render(&set.pump)?)?;
    let rendered: Vec<String> = set.shots.par_iter().map(render).collect::<Result<_>>()?;
    for (k, text) in rendered.iter().enumerate() {
        ctx.write(&mut outcome, &shot_file_name(&s.run_id, k), text)?;
    }
    let mut truth = Table::new(&["shot", "t_d_s", "p_s_w", "tau_b_s", "ringing_amp_w"]);
    for (k, t) in set.truth.iter().enumerate() {
        let mut cells = vec![k.to_string()];
        cells.extend([t.t_d, t.p_s, t.tau_b, t.ringing_amp].map(fmt_f64));
        truth.push(cells);
    }
    ctx.write(&mut outcome, &format!("{}_truth.csv", s.run_id), &truth.render(&ctx.prov))?;
    #[derive(Serialize)]
    struct Summary<'a> {
        run_id: &'a str,
        seed: u64,
        breakdown: McnBreakdown,
        mean_delay_s: f64,
        jitter_rel: f64,
    }
    let summary =
        Summary { run_id: &s.run_id, seed: ctx.seed, breakdown: set.breakdown, mean_delay_s: set.mean_delay, jitter_rel: set.jitter_rel };
    ctx.write(&mut outcome, &format!("{}_synth.json", s.run_id), &render_json(&ctx.prov, "synth", &summary))?;
    Ok(outcome)
}

/// Fits β per detuning, then the linear β(Δ_p) law when at least two
/// detunings lie above the threshold. A refused law fit is a row failure.
pub fn cmd_calibrate(ctx: &Ctx) -> Result<Outcome> {
    let m = &ctx.loaded.manifest;
    let c = m.calibrate.as_ref().context("manifest has no `calibrate` block")?;
    let data = DelayDataset::read_csv(&ctx.loaded.resolve(&c.dataset))?;
    if data.points.is_empty() {
        bail!("delay dataset is empty");
    }
    let cal = m.calib_context()?;
    let fits = fit_beta_per_detuning(&data, &cal);

    let mut outcome = Outcome::default();
    let mut table = Table::new(&["delta_p_gamma", "beta", "objective", "n_points", "at_boundary", "warnings", "error"]);
    let mut samples = Vec::new();
    let mut collapse = Table::new(&["n_atoms", "delta_p_gamma", "beta", "n_mc", "gamma_n_over_rate", "error"]);
    for (d, fit) in &fits {
        match fit {
            Ok(f) => {
                samples.push((f.delta_p, f.beta));
                table.push(vec![
                    fmt_f64(*d),
                    fmt_f64(f.beta),
                    fmt_f64(f.objective),
                    f.n_points.to_string(),
                    f.at_boundary.to_string(),
                    f.warnings.join("; "),
                    String::new(),
                ]);
                let pts = data.at_detuning(*d);
                match rate_collapse(&pts, &cal, &BetaChoice::Fixed { beta: f.beta }) {
                    Ok(cp) => {
                        for p in cp {
                            collapse.push(vec![
                                fmt_f64(p.n_atoms),
                                fmt_f64(p.delta_p),
                                fmt_f64(f.beta),
                                fmt_f64(p.n_mc),
                                fmt_f64(p.gamma_n_over_rate),
                                String::new(),
                            ]);
                        }
                    }
                    Err(e) => {
                        outcome.row_failures += 1;
                        collapse.push(vec![String::new(), fmt_f64(*d), fmt_f64(f.beta), String::new(), String::new(), e.to_string()]);
                    }
                }
            }
            Err(e) => {
                outcome.row_failures += 1;
                table.push(vec![fmt_f64(*d), String::new(), String::new(), String::new(), String::new(), String::new(), e.to_string()]);
            }
        }
    }
    let law = match fit_beta_law(&samples, c.min_detuning_gamma) {
        Ok(l) => serde_json::to_value(l)?,
        Err(e) => {
            outcome.row_failures += 1;
            eprintln!("β(Δp) law not fitted: {e}");
            serde_json::json!({ "error": format!("law fit refused: {e}") })
        }
    };
    ctx.write(&mut outcome, "beta_fits.csv", &table.render(&ctx.prov))?;
    ctx.write(&mut outcome, "rate_collapse.csv", &collapse.render(&ctx.prov))?;
    ctx.write(&mut outcome, "beta_law.json", &render_json(&ctx.prov, "beta_law", &law))?;
    Ok(outcome)
}

/// Relative-MCN grid plus both boundary curves.
pub fn cmd_map(ctx: &Ctx) -> Result<Outcome> {
    let m = &ctx.loaded.manifest;
    let grid = m.map_grid()?;
    let map = mcn_map(&grid, &m.calib_context()?, &m.beta.choice())?;
    let mut outcome = Outcome::default();
    let mut cells = Table::new(&[
        "n_mu",
        "n_atoms",
        "delta_p_gamma",
        "beta",
        "relative_mcn",
        "alpha_tilde",
        "eta_inh",
        "eta_s",
        "model_valid",
        "error",
    ]);
    for c in &map.cells {
        if c.error.is_some() {
            outcome.row_failures += 1;
        }
        let mut row: Vec<String> = [c.n_mu, c.n_atoms, c.delta_p, c.beta, c.ratio, c.alpha_tilde, c.eta_inh, c.eta_s].map(fmt_f64).to_vec();
        row.push(c.model_valid.to_string());
        row.push(c.error.clone().unwrap_or_default());
        cells.push(row);
    }
    let boundary = |pts: &[crate::calibration::BoundaryPoint]| {
        let mut t = Table::new(&["n_mu", "n_atoms", "delta_p_gamma", "residual"]);
        for p in pts {
            t.push([p.n_mu, p.n_atoms, p.delta_p, p.residual].map(fmt_f64).to_vec());
        }
        t
    };
    ctx.write(&mut outcome, "map_cells.csv", &cells.render(&ctx.prov))?;
    ctx.write(&mut outcome, "map_boundary_attenuation.csv", &boundary(&map.boundary_attenuation).render(&ctx.prov))?;
    ctx.write(&mut outcome, "map_boundary_equal.csv", &boundary(&map.boundary_equal).render(&ctx.prov))?;
    ctx.write(&mut outcome, "map.json", &render_json(&ctx.prov, "map", &map))?;
    Ok(outcome)
}
