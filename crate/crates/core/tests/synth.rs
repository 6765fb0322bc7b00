use mcn_core::model::{delay_jitter_rel, mean_delay};
use mcn_core::numerics::summary_stats;
use mcn_core::synth::{draw_delays, oracle_delay, synth_shot_set, SynthSpec, WIDTH_RATE_PRODUCT};
use mcn_core::traces::{Trace, SECH2_FWHM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_agrees_with_model_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let n_c = 10f64.powf(rng.random_range(0.0..6.0));
        let rate = 10f64.powf(rng.random_range(2.0..9.0));
        let n = 10f64.powf(rng.random_range(0.2..8.0));
        let a = oracle_delay(n_c, rate, n);
        let b = mean_delay(n_c, rate, n).unwrap();
        worst = worst.max(((a - b) / a).abs());
    }
    assert!(worst <= 1e-12, "worst relative difference {worst}");
}

#[test]
fn oracle_reference_operating_point() {
    let spec = SynthSpec::reference();
    let b = spec.breakdown().unwrap();
    let t = oracle_delay(b.n_mu, b.mean_rate_r, spec.n_atoms);
    assert!((t - 218e-9).abs() < 5e-9, "{t}");
    assert!(oracle_delay(b.n_mu, 2.0 * b.mean_rate_r, spec.n_atoms) < t);
    assert_eq!(spec.oracle_delay().unwrap(), oracle_delay(b.n_mc, b.mean_rate_r, spec.n_atoms));
}

#[test]
fn injected_jitter_law_is_reproduced() {
    let rel = delay_jitter_rel(8.3e4).unwrap();
    assert!((rel - 0.229).abs() < 1e-3);
    let delays = draw_delays(11, 380e-9, rel, 10_000);
    let s = summary_stats(&delays).unwrap();
    let ratio = s.std_dev / s.mean;
    assert!((ratio - 0.229).abs() < 0.01, "{ratio}");
    assert!(delays.iter().all(|&t| t > 0.0));
}

#[test]
fn generator_is_deterministic_per_seed() {
    let spec = SynthSpec { n_shots: 4, seed: 99, ..SynthSpec::reference() };
    let a = synth_shot_set(&spec).unwrap();
    let b = synth_shot_set(&spec).unwrap();
    assert_eq!(a.pump, b.pump);
    assert_eq!(a.shots, b.shots);
    assert_eq!(a.truth, b.truth);
    // shot k does not depend on how many shots follow it
    let c = synth_shot_set(&SynthSpec { n_shots: 2, ..spec.clone() }).unwrap();
    assert_eq!(a.shots[..2], c.shots[..]);
}

#[test]
fn truth_follows_model() {
    let spec = SynthSpec { n_shots: 3, ..SynthSpec::reference() };
    let s = synth_shot_set(&spec).unwrap();
    let b = &s.breakdown;
    let gamma_n = b.n_mc * b.mean_rate_r;
    for t in &s.truth {
        assert!((t.tau_b * gamma_n - WIDTH_RATE_PRODUCT).abs() < 1e-12);
        assert!((t.p_s - spec.peak_power_per_mc2 * b.n_mc * b.n_mc).abs() <= 1e-15 * t.p_s);
    }
    assert_eq!(s.mean_delay, mean_delay(b.n_mc, b.mean_rate_r, spec.n_atoms).unwrap());
}

#[test]
fn noise_level_matches_snr() {
    let spec = SynthSpec { n_shots: 20, snr: 10.0, ..SynthSpec::reference() };
    let s = synth_shot_set(&spec).unwrap();
    let p_s = s.truth[0].p_s;
    let lead: Vec<f64> = s
        .shots
        .iter()
        .flat_map(|tr| {
            let n = tr.len() / 10;
            tr.power()[..n].to_vec()
        })
        .collect();
    let st = summary_stats(&lead).unwrap();
    assert!(st.mean.abs() < 5.0 * st.std_err);
    assert!((st.std_dev * spec.snr / p_s - 1.0).abs() < 0.03, "{}", st.std_dev * spec.snr / p_s);
}

#[test]
fn noiseless_shot_peaks_at_truth() {
    let spec = SynthSpec { n_shots: 1, snr: f64::INFINITY, ..SynthSpec::reference() };
    let s = synth_shot_set(&spec).unwrap();
    let (trace, truth) = (&s.shots[0], s.truth[0]);
    let i = (0..trace.len()).max_by(|&a, &b| trace.power()[a].total_cmp(&trace.power()[b])).unwrap();
    assert!((trace.times()[i] - truth.t_d).abs() <= 0.5 * spec.dt + 1e-18);
    let tau = truth.tau_b / SECH2_FWHM;
    let expect = truth.p_s / ((trace.times()[i] - truth.t_d) / tau).cosh().powi(2);
    assert!((trace.power()[i] - expect).abs() <= 1e-12 * truth.p_s);
}

#[test]
fn ringing_adds_a_later_burst() {
    let spec = SynthSpec { n_shots: 1, snr: f64::INFINITY, ringing_ratio: 1.2, ..SynthSpec::reference() };
    let s = synth_shot_set(&spec).unwrap();
    let truth = s.truth[0];
    assert!((truth.ringing_amp - 1.2 * truth.p_s).abs() < 1e-15 * truth.p_s);
    let trace = &s.shots[0];
    let at = |t: f64| {
        let i = trace.times().iter().position(|&x| x >= t).unwrap();
        trace.power()[i]
    };
    assert!(at(truth.t_d + spec.ringing_gap * truth.tau_b) > at(truth.t_d));
}

#[test]
fn written_traces_read_back_exactly() {
    let spec = SynthSpec { n_shots: 1, ..SynthSpec::reference() };
    let s = synth_shot_set(&spec).unwrap();
    let mut buf = Vec::new();
    s.shots[0].write_csv(&mut buf, &["seed 0".to_string()]).unwrap();
    let back = Trace::from_csv_reader(buf.as_slice(), None).unwrap();
    assert_eq!(back.times(), s.shots[0].times());
    assert_eq!(back.power(), s.shots[0].power());
}
