mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;
use thermo2d::media::Moduli;
use thermo2d::simulate::{evolve, reconstruct, ModeState, ModeSystem, SimConfig, SimError};

fn random_state(rng: &mut StdRng) -> ModeState {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    ModeState { u: [c(), c()], w: [c(), c()], theta: c() }
}

fn random_xi(rng: &mut StdRng, r: std::ops::Range<f64>) -> [f64; 2] {
    let (rad, a) = (rng.gen_range(r), rng.gen_range(0.0..2.0 * PI));
    [rad * a.cos(), rad * a.sin()]
}

fn small_config() -> SimConfig {
    SimConfig { n: 64, period: 32.0 * PI, t_final: 16.0, samples: 16, ..SimConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_never_grows_at_the_stable_step(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::admissible_medium(&mut rng);
        let cfg = SimConfig::default();
        let dt = cfg.stable_dt(&m);
        let sys = ModeSystem::new(&m, random_xi(&mut rng, 0.1..cfg.r1));
        let mut s = random_state(&mut rng);
        let mut e = sys.energy(&s);
        for _ in 0..200 {
            s = sys.step(&s, dt);
            let next = sys.energy(&s);
            prop_assert!(next <= e * (1.0 + 1e-8), "{} -> {}", e, next);
            e = next;
        }
    }

    #[test]
    fn decoupled_system_conserves_wave_energy(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::admissible_medium(&mut rng).with_thermal(1e-300, 1.0).unwrap();
        let mut sys = ModeSystem::new(&m, random_xi(&mut rng, 0.5..1.0));
        sys.gamma = 0.0;
        let mut s = random_state(&mut rng);
        let theta0 = s.theta;
        let wave = |s: &ModeState| sys.energy(&ModeState { theta: Complex64::new(0.0, 0.0), ..*s });
        let e0 = wave(&s);
        let dt = 0.01;
        for _ in 0..1000 {
            s = sys.step(&s, dt);
        }
        prop_assert!((wave(&s) - e0).abs() <= 1e-8 * e0);
        let xi2 = sys.xi[0].powi(2) + sys.xi[1].powi(2);
        let exact = theta0 * (-m.kappa * xi2 * 10.0).exp();
        prop_assert!((s.theta - exact).norm() <= 1e-10 * theta0.norm());
    }

    #[test]
    fn hermitian_spectra_reconstruct_to_real_fields(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 16;
        let mut entries = vec![];
        for _ in 0..10 {
            let (i, j) = (rng.gen_range(1..n / 2), rng.gen_range(0..n));
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            entries.push(((i, j), z));
            entries.push(((n - i, (n - j) % n), z.conj()));
        }
        let field = reconstruct(n, &entries);
        let peak = field.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in &field {
            prop_assert!(z.im.abs() <= 1e-10 * peak.max(1.0));
        }
    }
}

#[test]
fn energy_rate_converges_at_first_order() {
    let mut rng = common::rng(21);
    for _ in 0..100 {
        let m = common::admissible_medium(&mut rng).with_thermal(1.0, 1.0).unwrap();
        let sys = ModeSystem::new(&m, random_xi(&mut rng, 0.1..2.0));
        let s = random_state(&mut rng);
        let rate = sys.dissipation(&s);
        let err = |dt: f64| ((sys.energy(&sys.step(&s, dt)) - sys.energy(&s)) / dt - rate).abs();
        let (e1, e2) = (err(1e-3), err(5e-4));
        let scale = 1.0 + rate.abs() + sys.energy(&s);
        assert!(e1 <= 10.0 * scale * 1e-3, "{e1}");
        assert!(e2 <= 0.55 * e1 + 1e-9 * scale, "{e1} {e2}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let m = Moduli::cubic(0.5, 0.0, 1.0).with_thermal(0.5, 1.0).unwrap();
    let cfg = small_config();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evolve(&m, &cfg).unwrap())
    };
    let (a, b) = (run(1), run(4));
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.supnorm), bits(&b.supnorm));
    assert_eq!(bits(&a.energy), bits(&b.energy));
}

#[test]
fn small_run_has_positive_decreasing_energy() {
    let m = Moduli::isotropic(1.0, 1.0).with_thermal(0.5, 1.0).unwrap();
    let r = evolve(&m, &small_config()).unwrap();
    assert_eq!(r.times.len(), 17);
    assert_eq!(r.times[0], 0.0);
    assert!(r.supnorm.iter().all(|v| *v > 0.0));
    assert!(r.energy.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
    assert!(r.fit.is_some());
    let mut csv = vec![];
    r.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 18);
}

#[test]
fn step_above_the_stability_bound_is_rejected() {
    let m = Moduli::cubic(0.5, 0.0, 1.0);
    let cfg = SimConfig { dt: Some(5.0), ..small_config() };
    assert!(matches!(evolve(&m, &cfg), Err(SimError::InvalidConfig(_))));
    let cfg = SimConfig { dt: Some(0.5 * cfg.stable_dt(&m)), ..small_config() };
    assert!(evolve(&m, &cfg).is_ok());
}

#[test]
fn config_files_reject_unknown_fields() {
    assert!(SimConfig::from_json(r#"{"n": 64, "period": 100.0}"#).is_ok());
    assert!(SimConfig::from_json(r#"{"grid": 64}"#).is_err());
    assert!(SimConfig::from_json(r#"{"n": 63}"#).is_err());
    let cfg = SimConfig::from_json(r#"{"seed": "temperature", "period": 100.0}"#).unwrap();
    assert_eq!(cfg.seed, thermo2d::simulate::Seed::Temperature);
}
