use proptest::prelude::*;
use qho_lg::currents::{classical_chopped_current, free_current};
use qho_lg::lg::{correlator, lg_report_mode, quasiprob_all, single_time_avg, Mode};
use qho_lg::{ChoppedState, CoherentState, Order, Phase, SignChoice, Truncation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quasiprobs_sum_to_one_and_rebuild_moments(
        x0 in -4.0f64..4.0,
        p0 in -4.0f64..4.0,
        t1 in 0.0f64..3.0,
        dt in 0.2f64..2.9,
    ) {
        let s = CoherentState::new(x0, p0).unwrap();
        let tr = Truncation::default();
        let (a, b) = (Phase(t1), Phase(t1 + dt));
        let q = quasiprob_all(s, a, b, &tr).unwrap();
        let signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
        let total: f64 = q.iter().map(|v| v.value).sum();
        prop_assert!((total - 1.0).abs() < 1e-8);
        let m1: f64 = q.iter().zip(signs).map(|(v, (s1, _))| s1 * v.value).sum();
        let m2: f64 = q.iter().zip(signs).map(|(v, (_, s2))| s2 * v.value).sum();
        let c: f64 = q.iter().zip(signs).map(|(v, (s1, s2))| s1 * s2 * v.value).sum();
        prop_assert!((m1 - single_time_avg(s, a)).abs() < 1e-8);
        prop_assert!((m2 - single_time_avg(s, b)).abs() < 1e-8);
        prop_assert!((c - correlator(s, a, b, &tr).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn luders_bound_over_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tr = Truncation::new(1e-8, 200_000);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let s = CoherentState::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)).unwrap();
        let t1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let dt = rng.gen_range(0.01..std::f64::consts::TAU);
        let r = lg_report_mode(s, Order::Two, dt, Phase(t1), &tr, Mode::Relaxed).unwrap();
        for (label, v) in &r.entries {
            // LG2 entries are 4q
            let q = 0.25 * v;
            assert!(q >= -0.125 - 0.25 * r.residual - 1e-12, "{label} {q} at {s:?} {t1} {dt}");
            worst = worst.min(q);
        }
    }
    assert!(worst < -0.02, "no violating draw at all: {worst}");
}

#[test]
fn classical_currents_sum_to_free_current() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let s = CoherentState::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)).unwrap();
        let th = Phase(rng.gen_range(0.01f64..3.1));
        let sum = classical_chopped_current(ChoppedState::new(s, SignChoice::Plus), th).value
            + classical_chopped_current(ChoppedState::new(s, SignChoice::Minus), th).value;
        let free = free_current(s, 0.0, th).value;
        assert!((sum - free).abs() < 1e-10, "{sum} vs {free}");
    }
}

#[test]
fn classical_current_matches_monte_carlo_flux() {
    // Gaussian Wigner ensemble cut to X > 0, evolved along x_θ = X cos θ + p sin θ;
    // the net count crossing 0 during [θ − h, θ + h] estimates the flux.
    let s = CoherentState::new(0.55, -1.925).unwrap();
    let cs = ChoppedState::new(s, SignChoice::Plus);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (n, th, h) = (10_000_000u64, 0.6f64, 0.005);
    let (sa, ca) = (th - h).sin_cos();
    let (sb, cb) = (th + h).sin_cos();
    let (mut up, mut down) = (0u64, 0u64);
    for _ in 0..n {
        let (x, p) = (s.x0 + normal.sample(&mut rng), s.p0 + normal.sample(&mut rng));
        if x <= 0.0 {
            continue;
        }
        match (x * ca + p * sa > 0.0, x * cb + p * sb > 0.0) {
            (false, true) => up += 1,
            (true, false) => down += 1,
            _ => {}
        }
    }
    let scale = 1.0 / (n as f64 * 2.0 * h);
    let mc = (up as f64 - down as f64) * scale;
    let sigma = ((up + down) as f64).sqrt() * scale;
    let exact = classical_chopped_current(cs, Phase(th)).value;
    assert!((mc - exact).abs() <= 3.0 * sigma, "mc {mc} ± {sigma} vs {exact}");
}
