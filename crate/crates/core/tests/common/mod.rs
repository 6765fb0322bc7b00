#![allow(dead_code)]

use mcn_core::calibration::{model_delay, CalibContext, DelayPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Log-spaced atom numbers spanning the reference experiment's range.
pub fn atom_numbers(count: usize) -> Vec<f64> {
    let (lo, hi) = (1e4f64.ln(), 2.2e5f64.ln());
    (0..count).map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Noise-free mean delays from the model at one detuning.
pub fn clean_delays(ctx: &CalibContext, delta_p: f64, beta: f64, ns: &[f64]) -> Vec<f64> {
    ns.iter().map(|&n| model_delay(ctx, n, delta_p, beta).unwrap()).collect()
}

/// Delay points with multiplicative Gaussian noise of relative size
/// `noise_rel`; the reported std is the matching per-shot spread of a
/// `n_shots` run.
pub fn noisy_points(ns: &[f64], clean: &[f64], delta_p: f64, noise_rel: f64, seed: u64) -> Vec<DelayPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_shots = 100;
    ns.iter()
        .zip(clean)
        .map(|(&n, &t)| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let mean_t_d = if noise_rel > 0.0 { t * (1.0 + noise_rel * z) } else { t };
            DelayPoint {
                n_atoms: n,
                delta_p,
                mean_t_d,
                std_t_d: noise_rel * t * (n_shots as f64).sqrt(),
                n_shots,
            }
        })
        .collect()
}

/// Aligns on the pump and analyzes every shot of a synthetic run with
/// detection smoothing matched to the pump rise time.
pub fn analyze_set(set: &mcn_core::synth::ShotSet, tau_p: f64) -> Vec<Option<mcn_core::traces::BurstFeatures>> {
    use mcn_core::traces::{align_time_zero, analyze_shot, DetectConfig};
    let t_zero = align_time_zero(&set.pump).unwrap();
    let cfg = DetectConfig { smoothing_time: tau_p, ..DetectConfig::default() };
    set.shots.iter().map(|tr| analyze_shot(tr, t_zero, &cfg).unwrap()).collect()
}
