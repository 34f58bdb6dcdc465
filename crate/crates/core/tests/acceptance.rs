//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use qho_lg::bohm::{bohm_trajectories, equal_fractions, quantile_seeds, BohmOptions};
use qho_lg::currents::{
    classical_chopped_current, coherent_derivatives, free_current, qp_via_currents, sequential_prob, smalltime_qp,
};
use qho_lg::lg::{correlator, lg_report_mode, quasiprob, quasiprob_all, single_time_avg, Mode};
use qho_lg::optimize::{golden_section, NelderMead};
use qho_lg::quad::GaussKronrod;
use qho_lg::scan::{quadrant_scan, reproduce_table1, tau_extremize, AxisRange, TauOptions};
use qho_lg::variants::{
    coherent_projector_optimize, squeeze_map, superposition_max_check, thermal_violation_curve,
};
use qho_lg::wigner::{projector_qw_bound, qp_via_wigner, qp_via_wigner_gaussian, wigner_lg2};
use qho_lg::{
    BohmSource, ChoppedState, CoherentState, GaussianState, GridSpec, Order, Phase, ProjectorBranch, ScanGrid,
    SignChoice, SqueezeParams, Truncation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

const SIGN_PAIRS: [(SignChoice, SignChoice); 4] = [
    (SignChoice::Plus, SignChoice::Plus),
    (SignChoice::Plus, SignChoice::Minus),
    (SignChoice::Minus, SignChoice::Plus),
    (SignChoice::Minus, SignChoice::Minus),
];

fn st(x0: f64, p0: f64) -> CoherentState<f64> {
    CoherentState::new(x0, p0).unwrap()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn table1() -> Outcome {
    let report = reproduce_table1(&ScanGrid::<f64>::default()).map_err(e)?;
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            let o = &r.refined;
            format!(
                "{:?} {:.4} ({:.1}%) at ({:.3}, {:.3}) value {} location {}",
                o.order,
                o.value,
                o.luders_percent,
                o.x0,
                o.p0,
                if r.value_ok { "ok" } else { "off" },
                if r.location_ok { "ok" } else { "off" }
            )
        })
        .collect();
    Ok((report.passed(), rows.join("; ")))
}

fn optimal_timings() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (order, x0, p0, target) in [
        (Order::Two, 0.550, 1.925, 0.555),
        (Order::Three, 0.859, 3.317, 0.254),
        (Order::Four, 0.929, 3.666, 0.166),
    ] {
        let t = tau_extremize(st(x0, p0), order, &TauOptions::default());
        let hit = (t.dtheta_folded - target).abs() <= 0.01;
        ok &= hit;
        parts.push(format!("{order:?} Δθ* {:.4} (target {target})", t.dtheta_folded));
    }
    Ok((ok, parts.join("; ")))
}

fn route_agreement() -> Outcome {
    let xs = [-1.2, -0.4, 0.3, 0.9, 1.6];
    let ps = [-2.5, -1.0, 0.2, 1.3, 2.4];
    let thetas = [0.3, 0.7, 1.2, 1.9, 2.7];
    let tr = Truncation::default();
    let grid = GridSpec::default();
    let (mut worst_c, mut worst_w) = (0.0f64, 0.0f64);
    let mut n = 0;
    for &x0 in &xs {
        for &p0 in &ps {
            for &t in &thetas {
                let s = st(x0, p0);
                let q = quasiprob(s, SignChoice::Minus, SignChoice::Plus, Phase(0.0), Phase(t), &tr).map_err(e)?.value;
                let c = qp_via_currents(s, Phase(t)).map_err(e)?.value;
                let (w, _) = qp_via_wigner(s, SignChoice::Minus, SignChoice::Plus, Phase(t), &grid).map_err(e)?;
                worst_c = worst_c.max((c - q).abs());
                worst_w = worst_w.max((w.value - q).abs());
                n += 1;
            }
        }
    }
    Ok((
        worst_c <= 1e-4 && worst_w <= 1e-3,
        format!("{n} points, max |currents − eigen| {worst_c:.2e}, max |wigner − eigen| {worst_w:.2e}"),
    ))
}

fn wigner_lg2_optimum() -> Outcome {
    let s = st(0.55, -1.925);
    let f = |t: f64| wigner_lg2(s, SignChoice::Minus, SignChoice::Plus, Phase(t)).unwrap_or(f64::INFINITY);
    let (t, qw) = golden_section(f, 0.3, 0.9, 1e-9);
    let q = quasiprob(s, SignChoice::Minus, SignChoice::Plus, Phase(0.0), Phase(t), &Truncation::default())
        .map_err(e)?
        .value;
    let p12 = sequential_prob(s, SignChoice::Minus, SignChoice::Plus, Phase(t)).map_err(e)?;
    let gap = (qw - (p12 + 2.0 * (q - p12))).abs();
    Ok((
        (qw + 0.0881).abs() <= 0.002 && gap <= 1e-6,
        format!("q^W(−,+) {qw:.5} at θ2 {t:.4}; identity residual {gap:.1e}"),
    ))
}

fn coherent_projectors() -> Outcome {
    let (g, pp) = coherent_projector_optimize::<f64>(ProjectorBranch::PlusPlus).map_err(e)?;
    let pp_ok = (pp + 0.0133).abs() <= 5e-4
        && (g.g1.norm() - 1.55).abs() <= 0.02
        && ((g.g2.arg() - g.g1.arg()).abs() - 1.047).abs() <= 0.02;
    let (h, pm) = coherent_projector_optimize::<f64>(ProjectorBranch::PlusMinus).map_err(e)?;
    let pm_ok = (pm + 0.1054).abs() <= 5e-4
        && h.g1.im.abs() < 1e-5
        && h.g2.im.abs() < 1e-5
        && (h.g2.re - 0.536).abs() <= 0.01
        && (h.g2.re - h.g1.re / 2.0).abs() <= 0.01;
    let mut sup = 0.0f64;
    for b in [ProjectorBranch::PlusPlus, ProjectorBranch::PlusMinus] {
        sup = sup.max((superposition_max_check::<f64>(b).map_err(e)?.q + 0.125).abs());
    }
    // ψ, A, B as unit vectors: A = e1, B = (cos u, sin u, 0), ψ = (cos v, sin v cos w, sin v sin w)
    let bound = |x: &[f64]| {
        let (u, v, w) = (x[0], x[1], x[2]);
        let a = v.cos();
        let b = u.cos() * v.cos() + u.sin() * v.sin() * w.cos();
        projector_qw_bound(Complex64::new(u.cos(), 0.0), Complex64::new(a, 0.0), Complex64::new(b, 0.0))
            .unwrap_or(f64::INFINITY)
    };
    let nm = NelderMead {
        f_tol: 1e-15,
        x_tol: 1e-10,
        max_iter: 20_000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let qw_min = (0..16)
        .map(|_| {
            let start = [rng.gen_range(0.0..3.1), rng.gen_range(0.0..3.1), rng.gen_range(0.0..3.1)];
            nm.minimize(bound, &start, &[0.3, 0.3, 0.3]).value
        })
        .fold(f64::INFINITY, f64::min);
    let ok = pp_ok && pm_ok && sup <= 1e-10 && (qw_min + 1.0 / 3.0).abs() <= 1e-6;
    Ok((
        ok,
        format!(
            "++ {pp:.5} at |γ1| {:.3}, phase {:.3}; +− {pm:.5} at γ = ({:.3}, {:.3}); superposition gap {sup:.1e}; q^W bound min {qw_min:.8}",
            g.g1.norm(),
            g.g2.arg() - g.g1.arg(),
            h.g1.re,
            h.g2.re
        ),
    ))
}

fn thermal_robustness() -> Outcome {
    let temps: Vec<f64> = (0..20).map(|k| 2.0 * k as f64 / 19.0).collect();
    let tr = Truncation::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for order in [Order::Two, Order::Three, Order::Four] {
        let curve = thermal_violation_curve(order, &temps, &tr).map_err(e)?;
        let starts_at_one = (curve[0].1 - 1.0).abs() < 1e-12;
        let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
        ok &= starts_at_one && monotone;
        let zero = curve.iter().find(|(_, r)| *r <= 0.0).map(|(t, _)| *t);
        if order == Order::Two {
            ok &= zero.is_some_and(|t| (0.5..=1.5).contains(&t));
        }
        parts.push(format!(
            "{order:?} monotone {monotone}, first zero {}",
            zero.map_or("none".into(), |t| format!("{t:.3}"))
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn small_time_series() -> Outcome {
    let s = st(0.55, -1.925);
    let derivs = coherent_derivatives(s, 2);
    let tr = Truncation::default();
    let mut worst = (0.0f64, 0.0f64);
    for k in 1..=20 {
        let t = 0.01 * k as f64;
        let r = lg_report_mode(s, Order::Two, t, Phase(0.0), &tr, Mode::Relaxed).map_err(e)?;
        // LG2 entry "-+" is 4 q(−,+)
        let exact = 0.25 * r.get("-+").ok_or("missing -+ entry")?;
        let series = smalltime_qp(&derivs, Phase(t), 2).map_err(e)?;
        let rel = ((series - exact) / exact).abs();
        if !(rel <= worst.1) {
            worst = (t, rel);
        }
    }
    Ok((
        worst.1 <= 0.05,
        format!("max relative error {:.3} at θ = {:.2}", worst.1, worst.0),
    ))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tr = Truncation::default();

    let mut sum_err = 0.0f64;
    for _ in 0..200 {
        let s = st(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let a = Phase(rng.gen_range(0.0..3.0));
        let b = Phase(a.0 + rng.gen_range(0.2..2.9));
        let q = quasiprob_all(s, a, b, &tr).map_err(e)?;
        let total: f64 = q.iter().map(|v| v.value).sum();
        let (mut m1, mut m2, mut c) = (0.0, 0.0, 0.0);
        for (v, (s1, s2)) in q.iter().zip(SIGN_PAIRS) {
            let (u1, u2) = (s1.value::<f64>(), s2.value::<f64>());
            m1 += u1 * v.value;
            m2 += u2 * v.value;
            c += u1 * u2 * v.value;
        }
        let c_direct = correlator(s, a, b, &tr).map_err(e)?;
        sum_err = sum_err
            .max((total - 1.0).abs())
            .max((m1 - single_time_avg(s, a)).abs())
            .max((m2 - single_time_avg(s, b)).abs())
            .max((c - c_direct).abs());
    }

    let luders_tr = Truncation::new(1e-8, 200_000);
    let mut floor = f64::INFINITY;
    let mut luders_ok = true;
    for _ in 0..10_000 {
        let s = st(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let t1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let dt = rng.gen_range(0.01..std::f64::consts::TAU);
        let r = lg_report_mode(s, Order::Two, dt, Phase(t1), &luders_tr, Mode::Relaxed).map_err(e)?;
        for (_, v) in &r.entries {
            let q = 0.25 * v;
            luders_ok &= q >= -0.125 - 0.25 * r.residual - 1e-12;
            floor = floor.min(q);
        }
    }

    let mut rule_err = 0.0f64;
    for _ in 0..200 {
        let s = st(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let th = Phase(rng.gen_range(0.01..3.1));
        let sum = classical_chopped_current(ChoppedState::new(s, SignChoice::Plus), th).value
            + classical_chopped_current(ChoppedState::new(s, SignChoice::Minus), th).value;
        rule_err = rule_err.max((sum - free_current(s, 0.0, th).value).abs());
    }

    let cs = ChoppedState::new(st(0.55, -1.925), SignChoice::Plus);
    let fractions = equal_fractions::<f64>(9);
    let seeds = quantile_seeds(cs, &fractions).map_err(e)?;
    let times: Vec<f64> = (1..=12).map(|k| 0.05 * k as f64).collect();
    let bundle = bohm_trajectories(BohmSource::Chopped(cs), &seeds, &times, &BohmOptions::default()).map_err(e)?;
    let quad = GaussKronrod::new(1e-12, 1e-11);
    let mut quantile_err = 0.0f64;
    let mut ordered = bundle.halted.iter().all(Option::is_none);
    for (it, &t) in times.iter().enumerate() {
        for k in 0..seeds.len() {
            let x = bundle.paths[k][it];
            let density =
                |y: f64| qho_lg::currents::chopped_wavefunction(cs, y, Phase(t)).map_or(0.0, |v| v.norm_sqr());
            let cum = quad.integrate_lower(density, x).map_err(e)?.value / cs.norm();
            quantile_err = quantile_err.max((cum - fractions[k]).abs());
            if k > 0 {
                ordered &= bundle.paths[k - 1][it] < x;
            }
        }
    }

    let mut squeeze_err = 0.0f64;
    for _ in 0..5 {
        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let z = SqueezeParams::new(rng.gen_range(0.1..0.8), rng.gen_range(-3.0..3.0)).map_err(e)?;
        let t1 = rng.gen_range(0.0..0.5);
        let t2 = t1 + rng.gen_range(0.4..2.0);
        let m = squeeze_map(a, z, Phase(t1), Phase(t2));
        let coherent = CoherentState::from_alpha(m.beta);
        let g = GaussianState::squeezed(a, z.r, z.phi).evolve(Phase(t1));
        for (s1, s2) in SIGN_PAIRS {
            let q = quasiprob(coherent, s1, s2, m.theta1, m.theta2, &tr).map_err(e)?.value;
            let (w, _) = qp_via_wigner_gaussian(&g, s1, s2, Phase(t2 - t1), &GridSpec::default()).map_err(e)?;
            squeeze_err = squeeze_err.max((q - w.value).abs());
        }
    }

    let mut grid = ScanGrid::new(AxisRange::new(0.0, 1.0, 0.25).map_err(e)?, AxisRange::new(1.5, 2.5, 0.25).map_err(e)?)
        .map_err(e)?;
    grid.tau.samples = 180;
    let csv_with = |threads: usize| -> Result<Vec<u8>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(e)?;
        let scan = pool.install(|| quadrant_scan(&grid, Order::Two)).map_err(e)?;
        let mut out = Vec::new();
        scan.write_heatmap_csv(&mut out).map_err(e)?;
        Ok(out)
    };
    let first = csv_with(1)?;
    let deterministic = first == csv_with(1)? && first == csv_with(3)?;

    let ok = sum_err <= 1e-8
        && luders_ok
        && rule_err <= 1e-10
        && ordered
        && quantile_err <= 0.02
        && squeeze_err <= 1e-4
        && deterministic;
    Ok((
        ok,
        format!(
            "Σq/moments {sum_err:.1e}; Lüders ok {luders_ok} (floor {floor:.4}); sum rule {rule_err:.1e}; \
             Bohm ordered {ordered}, quantile drift {quantile_err:.1e}; squeeze {squeeze_err:.1e}; \
             scan byte-identical {deterministic}"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("optimal-state table", table1),
        ("optimal timings", optimal_timings),
        ("route agreement", route_agreement),
        ("wigner LG2 optimum", wigner_lg2_optimum),
        ("coherent projectors", coherent_projectors),
        ("thermal robustness", thermal_robustness),
        ("small-time series", small_time_series),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = run().unwrap_or_else(|msg| (false, format!("error: {msg}")));
        failed += usize::from(!pass);
        println!(
            "criterion {} {name}: {} [{:.1}s] {detail}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
