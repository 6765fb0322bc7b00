use mcn_core::calibration::BetaLaw;
use mcn_core::model::{
    effective_collective_rate, gamma_n_from_delay, inhomogeneous_factor, mcn, mean_delay, peak_od, peak_od_closed_form,
    radial_average, radial_mean_rate, AtomSpecies, DriveConfig, EnsembleGeometry, McnPrelude,
};
use mcn_core::numerics::QuadratureSpec;
use proptest::prelude::*;

fn rb() -> AtomSpecies {
    AtomSpecies::rb87_d1()
}

fn dilute_species() -> AtomSpecies {
    AtomSpecies { sigma13: 1e-40, ..rb() }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_limit_collapse(
        log_n in 0.0f64..6.0,
        omega in 0.5f64..10.0,
        extra in 0.1f64..30.0,
        tau_ns in 10.0f64..1000.0,
        sigma_a_um in 0.5f64..5.0,
        ratio in 1e3f64..1e4,
        beta in 0.0f64..2.0,
    ) {
        let sa = sigma_a_um * 1e-6;
        let geom = EnsembleGeometry::new(sa, ratio * sa, 0.03, 2.0 * sa, 795e-9).unwrap();
        let drive = DriveConfig::new(omega, omega + extra, tau_ns * 1e-9).unwrap();
        let n = 10f64.powf(log_n);
        let b = mcn(n, &drive, &geom, &dilute_species(), beta, &QuadratureSpec::default()).unwrap();
        prop_assert!((b.eta_inh - 1.0).abs() < 1e-3);
        prop_assert!((b.eta_s - 1.0).abs() < 1e-3);
        prop_assert!(rel(b.n_mc, geom.mu * n) < 1e-3);
    }

    #[test]
    fn eta_s_decreases_with_attenuation(
        n in 1e3f64..3e5,
        delta in 7.0f64..30.0,
        a1 in 0.0f64..20.0,
        da in 1e-3f64..20.0,
    ) {
        let drive = DriveConfig::new(6.4, delta, 130e-9).unwrap();
        let pre = McnPrelude::compute(n, &drive, &EnsembleGeometry::hollow_core_fiber(), &rb(), &QuadratureSpec::default()).unwrap();
        let (_, lo) = pre.shadow(a1).unwrap();
        let (_, hi) = pre.shadow(a1 + da).unwrap();
        prop_assert!(hi < lo, "eta_s({}) = {hi} !< eta_s({a1}) = {lo}", a1 + da);
        prop_assert!(hi > 0.0 && lo <= 1.0);
    }

    #[test]
    fn eta_inh_decreases_with_spread(tau_ns in 1.0f64..1e3, s1 in 0.0f64..1e9, ds in 1.0f64..1e9) {
        let tau = tau_ns * 1e-9;
        let a = inhomogeneous_factor(tau, s1);
        let b = inhomogeneous_factor(tau, s1 + ds);
        prop_assert!(b <= a);
        prop_assert!(b > 0.0 && a <= 1.0);
        if s1 > 1.0 / tau {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn unit_convention_invariance(
        log_n in 2.0f64..6.0,
        omega in 1.0f64..10.0,
        extra in 0.5f64..30.0,
        tau_ns in 20.0f64..500.0,
        beta in 0.0f64..1.0,
    ) {
        let species = rb();
        let drive = DriveConfig::new(omega, omega + extra, tau_ns * 1e-9).unwrap();
        let geom = EnsembleGeometry::hollow_core_fiber();
        let quad = QuadratureSpec::default();
        let n = 10f64.powf(log_n);
        let k = 1.0 / species.gamma;
        let si = mcn(n, &drive, &geom, &species, beta, &quad).unwrap();
        let gu = mcn(n, &drive.in_rate_units(k), &geom, &species.in_rate_units(k), beta, &quad).unwrap();
        for (name, a, b) in [
            ("eta_inh", si.eta_inh, gu.eta_inh),
            ("eta_s", si.eta_s, gu.eta_s),
            ("n_mc", si.n_mc, gu.n_mc),
            ("gain", si.gain, gu.gain),
            ("alpha_tilde", si.alpha_tilde, gu.alpha_tilde),
        ] {
            prop_assert!(rel(b, a) <= 1e-12, "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn delay_inverse(n_c in 1.0f64..1e6, rate in 1e2f64..1e9, log_n in 0.5f64..8.0) {
        let n = 10f64.powf(log_n);
        let t = mean_delay(n_c, rate, n).unwrap();
        let back = gamma_n_from_delay(t, n).unwrap();
        prop_assert!(rel(back, n_c * rate) <= 1e-12);
    }
}

#[test]
fn closed_forms_over_random_geometries() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let species = rb();
    let quad = QuadratureSpec::default();
    for _ in 0..100 {
        let sa = rng.random_range(0.5e-6..5e-6);
        let sp = rng.random_range(0.5e-6..20e-6);
        let geom = EnsembleGeometry::new(sa, sp, rng.random_range(0.01..0.1), 10.0 * sa, 795e-9).unwrap();
        let q = (sa / sp).powi(2);
        let avg2 = radial_average(|r| (-2.0 * r * r / (sp * sp)).exp(), &geom, &quad).unwrap();
        let avg4 = radial_average(|r| (-4.0 * r * r / (sp * sp)).exp(), &geom, &quad).unwrap();
        assert!(rel(avg2, 1.0 / (1.0 + 2.0 * q)) < 1e-8, "{sa} {sp}");
        assert!(rel(avg4, 1.0 / (1.0 + 4.0 * q)) < 1e-8, "{sa} {sp}");
        let n = rng.random_range(1e3..1e6);
        let od = peak_od(n, &geom, &species, &quad).unwrap();
        assert!(rel(od, peak_od_closed_form(n, &geom, &species)) < 1e-8);
    }
}

#[test]
fn n_mc_increases_with_detuning_on_published_law() {
    let geom = EnsembleGeometry::hollow_core_fiber();
    let quad = QuadratureSpec::default();
    for n in [2e4, 8.3e4, 2.2e5] {
        let values: Vec<f64> = (0..20)
            .map(|i| {
                let delta = 7.0 + (26.4 - 7.0) * i as f64 / 19.0;
                let drive = DriveConfig::new(6.4, delta, 130e-9).unwrap();
                mcn(n, &drive, &geom, &rb(), BetaLaw::PUBLISHED.eval(delta), &quad).unwrap().n_mc
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]), "N = {n}: {values:?}");
    }
}

#[test]
fn collective_rate_at_vanishing_attenuation() {
    let geom = EnsembleGeometry::hollow_core_fiber();
    let quad = QuadratureSpec::default();
    let drive = DriveConfig::new(6.4, 18.4, 130e-9).unwrap();
    let n = 8.3e4;
    let base = geom.mu * n * radial_mean_rate(&drive, &geom, &rb(), &quad).unwrap();
    let exact = effective_collective_rate(n, &drive, &geom, &rb(), 0.0, &quad).unwrap();
    assert!(rel(exact, base) < 1e-10);
    // a vanishing but nonzero α̃ goes through the longitudinal integral
    let integrated = effective_collective_rate(n, &drive, &geom, &rb(), 1e-14, &quad).unwrap();
    assert!(rel(integrated, base) < 1e-10);
}

#[test]
fn rate_is_even_in_detuning() {
    let geom = EnsembleGeometry::hollow_core_fiber();
    let quad = QuadratureSpec::default();
    let plus = radial_mean_rate(&DriveConfig::new(6.4, 18.4, 130e-9).unwrap(), &geom, &rb(), &quad).unwrap();
    let minus = radial_mean_rate(&DriveConfig::new(6.4, -18.4, 130e-9).unwrap(), &geom, &rb(), &quad).unwrap();
    assert_eq!(plus, minus);
}
