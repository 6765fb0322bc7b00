//! Relative MCN over a (N_μ, Δ_p) grid with its two boundary curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::McnPrelude;
use crate::numerics::find_root;

use super::{BetaLaw, CalibContext, CalibrationError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaChoice {
    Fixed { beta: f64 },
    Law(BetaLaw),
}

impl BetaChoice {
    pub fn at(&self, delta_p: f64) -> f64 {
        match self {
            BetaChoice::Fixed { beta } => *beta,
            BetaChoice::Law(law) => law.eval(delta_p),
        }
    }
}

/// N_μ log-spaced, Δ_p (units of Γ) linearly spaced; both ranges inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapGrid {
    pub n_mu_min: f64,
    pub n_mu_max: f64,
    pub n_mu_points: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
}

impl MapGrid {
    fn validate(&self) -> Result<(), CalibrationError> {
        let bad = |m: &str| Err(CalibrationError::InvalidGrid(m.into()));
        if self.n_mu_points == 0 || self.delta_points == 0 {
            return bad("resolutions must be at least 1");
        }
        if !(self.n_mu_min > 0.0 && self.n_mu_min <= self.n_mu_max && self.n_mu_max.is_finite()) {
            return bad("need 0 < n_mu_min <= n_mu_max");
        }
        if !(self.delta_min > 0.0 && self.delta_min <= self.delta_max && self.delta_max.is_finite()) {
            return bad("need 0 < delta_min <= delta_max");
        }
        Ok(())
    }

    pub fn n_mu_values(&self) -> Vec<f64> {
        axis(self.n_mu_min.ln(), self.n_mu_max.ln(), self.n_mu_points).into_iter().map(f64::exp).collect()
    }

    pub fn delta_values(&self) -> Vec<f64> {
        axis(self.delta_min, self.delta_max, self.delta_points)
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapCell {
    pub n_mu: f64,
    pub n_atoms: f64,
    pub delta_p: f64,
    pub beta: f64,
    /// N_mc/N_μ; NaN when the evaluation failed.
    pub ratio: f64,
    pub alpha_tilde: f64,
    pub eta_inh: f64,
    pub eta_s: f64,
    /// Δ_p > Ω_p⁽⁰⁾, where the effective two-level description holds.
    pub model_valid: bool,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub n_mu: f64,
    pub n_atoms: f64,
    pub delta_p: f64,
    /// Value of the defining function at the point.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McnMap {
    pub grid: MapGrid,
    /// Row-major: `cells[i_delta * n_mu_points + i_n]`.
    pub cells: Vec<MapCell>,
    /// α̃ = 1, one point per detuning row where it is crossed.
    pub boundary_attenuation: Vec<BoundaryPoint>,
    /// η_inh = η_s(α̃ = 1), one point per N_μ column where it is crossed.
    pub boundary_equal: Vec<BoundaryPoint>,
}

impl McnMap {
    pub fn cell(&self, i_delta: usize, i_n: usize) -> &MapCell {
        &self.cells[i_delta * self.grid.n_mu_points + i_n]
    }
}

fn evaluate_cell(ctx: &CalibContext, n_mu: f64, delta_p: f64, beta: f64) -> MapCell {
    let n_atoms = n_mu / ctx.geom.mu;
    let mut cell = MapCell {
        n_mu,
        n_atoms,
        delta_p,
        beta,
        ratio: f64::NAN,
        alpha_tilde: f64::NAN,
        eta_inh: f64::NAN,
        eta_s: f64::NAN,
        model_valid: delta_p > ctx.omega_p0,
        error: None,
    };
    let result = ctx
        .drive(delta_p)
        .map_err(|e| e.to_string())
        .and_then(|d| McnPrelude::compute(n_atoms, &d, &ctx.geom, &ctx.species, &ctx.quad).map_err(|e| e.to_string()))
        .and_then(|pre| pre.finish(beta).map_err(|e| e.to_string()));
    match result {
        Ok(b) => {
            cell.ratio = b.relative_mcn();
            cell.alpha_tilde = b.alpha_tilde;
            cell.eta_inh = b.eta_inh;
            cell.eta_s = b.eta_s;
        }
        Err(e) => cell.error = Some(e),
    }
    cell
}

/// N where α̃(N) = 1 at fixed Δ_p, searched in ln N across the grid range.
fn attenuation_crossing(ctx: &CalibContext, grid: &MapGrid, delta_p: f64, beta: f64) -> Option<BoundaryPoint> {
    let drive = ctx.drive(delta_p).ok()?;
    let f = |ln_n: f64| -> f64 {
        McnPrelude::compute(ln_n.exp(), &drive, &ctx.geom, &ctx.species, &ctx.quad)
            .map(|p| p.alpha_tilde(beta) - 1.0)
            .unwrap_or(f64::NAN)
    };
    let lo = (grid.n_mu_min / ctx.geom.mu).ln();
    let hi = (grid.n_mu_max / ctx.geom.mu).ln();
    if !(hi > lo) {
        return None;
    }
    let ln_n = find_root(f, (lo, hi), 1e-13).ok()?;
    let n_atoms = ln_n.exp();
    Some(BoundaryPoint { n_mu: n_atoms * ctx.geom.mu, n_atoms, delta_p, residual: f(ln_n) })
}

/// Δ_p where η_inh = η_s(α̃ = 1) at fixed N.
fn equal_crossing(ctx: &CalibContext, grid: &MapGrid, n_mu: f64) -> Option<BoundaryPoint> {
    let n_atoms = n_mu / ctx.geom.mu;
    let f = |delta_p: f64| -> f64 {
        ctx.drive(delta_p)
            .ok()
            .and_then(|d| McnPrelude::compute(n_atoms, &d, &ctx.geom, &ctx.species, &ctx.quad).ok())
            .and_then(|p| p.shadow(1.0).ok().map(|(_, eta_s)| p.eta_inh - eta_s))
            .unwrap_or(f64::NAN)
    };
    if !(grid.delta_max > grid.delta_min) {
        return None;
    }
    let delta_p = find_root(f, (grid.delta_min, grid.delta_max), 1e-12).ok()?;
    Some(BoundaryPoint { n_mu, n_atoms, delta_p, residual: f(delta_p) })
}

/// Evaluates N_mc/N_μ on the grid and locates both boundary curves by 1-D
/// root bracketing: α̃ − 1 along N in every detuning row, and
/// η_inh − η_s(α̃ = 1) along Δ_p in every N_μ column. Rows or columns without
/// a sign change contribute no boundary point. Failed cells keep their error
/// message instead of aborting the map.
pub fn mcn_map(grid: &MapGrid, ctx: &CalibContext, beta: &BetaChoice) -> Result<McnMap, CalibrationError> {
    grid.validate()?;
    let n_mus = grid.n_mu_values();
    let deltas = grid.delta_values();

    let rows: Vec<(Vec<MapCell>, Option<BoundaryPoint>)> = deltas
        .par_iter()
        .map(|&d| {
            let b = beta.at(d);
            let cells = n_mus.iter().map(|&n| evaluate_cell(ctx, n, d, b)).collect();
            (cells, attenuation_crossing(ctx, grid, d, b))
        })
        .collect();
    let boundary_equal: Vec<BoundaryPoint> = n_mus.par_iter().filter_map(|&n| equal_crossing(ctx, grid, n)).collect();

    let mut cells = Vec::with_capacity(n_mus.len() * deltas.len());
    let mut boundary_attenuation = Vec::new();
    for (row, crossing) in rows {
        cells.extend(row);
        boundary_attenuation.extend(crossing);
    }
    Ok(McnMap { grid: *grid, cells, boundary_attenuation, boundary_equal })
}
