//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sagin_relay::analytic::{
    abdr, analytic_metrics, ccdf_z, fso_continuous_mass, fso_fade_cdf, laplace_interference, AccessAnalysis,
    BrepFactors, ZContext,
};
use sagin_relay::model::units::dbw_to_watts;
use sagin_relay::montecarlo::{estimate_metrics, round_rng, sample_interference, sample_z, SimulationOptions};
use sagin_relay::planner::{min_power_for_abdr_ratio, min_power_for_brep, PlannerOptions};
use sagin_relay::quadrature::{integrate, Tolerance};
use sagin_relay::special::{binomial_series, cos_weighted_rayleigh_mass};
use sagin_relay::stochastic::{
    blockage_probability, contact_angle_pdf, nearest_sat_distance_cdf, nearest_sat_distance_pdf,
    sample_fso_fade, sample_nearest_satellite, sample_users, user_distance_cdf, user_distance_pdf,
    user_polar_angle_cdf, FsoDeficit, SatelliteSampling,
};
use sagin_relay::NetworkConfig;

use common::*;

const N_KS: usize = 100_000;
const MC_ROUNDS: usize = 10_000;
const SEED: u64 = 0x5A61_2024;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mc(cfg: &NetworkConfig) -> sagin_relay::montecarlo::MetricsEstimate {
    estimate_metrics(
        cfg,
        &SimulationOptions {
            rounds: MC_ROUNDS,
            seed: SEED,
            ..SimulationOptions::default()
        },
    )
    .expect("simulation")
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // Integrals over a spread of geometries.
    let mut worst_user: f64 = 0.0;
    let mut worst_sat: f64 = 0.0;
    let mut worst_contact: f64 = 0.0;
    for altitude_km in [300.0, 500.0, 1000.0, 1500.0, 2000.0] {
        for n in [1, 10, 100, 300, 720] {
            let cfg = NetworkConfig::default()
                .with_sat_altitude(altitude_km * 1e3)
                .with_sat_count(n);
            let g = cfg.geometry();
            let user = integrate(
                |d| user_distance_pdf(d, &g),
                g.hap_altitude,
                g.d_max,
                Tolerance::relative(1e-13),
            )
            .unwrap()
            .value;
            worst_user = worst_user.max((user - 1.0).abs());
            let sat = integrate(
                |d| nearest_sat_distance_pdf(d, &cfg),
                g.fso_d_min,
                g.fso_d_max,
                Tolerance::relative(1e-13),
            )
            .unwrap()
            .value;
            worst_sat = worst_sat.max((sat - (1.0 - blockage_probability(&cfg))).abs());
            let contact = integrate(
                |t| contact_angle_pdf(t, n),
                0.0,
                std::f64::consts::PI,
                Tolerance::relative(1e-13),
            )
            .unwrap()
            .value;
            worst_contact = worst_contact.max((contact - 1.0).abs());
        }
    }
    pass &= worst_user <= 1e-9 && worst_sat <= 1e-9 && worst_contact <= 1e-9;
    notes.push(format!(
        "pdf mass errors user {worst_user:.1e} sat {worst_sat:.1e} contact {worst_contact:.1e}"
    ));

    let cfg = desk();
    let g = cfg.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut distances = Vec::with_capacity(N_KS);
    let mut angles = Vec::with_capacity(N_KS);
    while distances.len() < N_KS {
        for u in sample_users(&mut rng, &cfg, &g) {
            if distances.len() < N_KS {
                distances.push(u.distance);
                angles.push(u.polar_angle);
            }
        }
    }
    let mut stats = vec![
        ("user distance", ks_continuous(distances, |d| user_distance_cdf(d, &g))),
        ("user angle", ks_continuous(angles, |t| user_polar_angle_cdf(t, &g))),
    ];

    for (label, method, n) in [
        ("sat distance (contact)", SatelliteSampling::ContactAngle, N_KS),
        ("sat distance (bpp)", SatelliteSampling::FullBpp, N_KS),
    ] {
        let d: Vec<f64> = (0..n)
            .map(|_| sample_nearest_satellite(&mut rng, &cfg, method, FsoDeficit::AtCap).distance)
            .collect();
        stats.push((label, ks_continuous(d, |x| nearest_sat_distance_cdf(x, &cfg))));
    }

    let mass = fso_continuous_mass(&cfg).unwrap();
    let a0 = cfg.pointing_cap;
    let at_cap: Vec<f64> = (0..N_KS)
        .map(|_| sample_fso_fade(&mut rng, &cfg, FsoDeficit::AtCap).fade)
        .collect();
    stats.push((
        "fso fade (deficit at cap)",
        ks_statistic(
            at_cap,
            |h| if h >= a0 { 1.0 } else { fso_fade_cdf(h, &cfg).unwrap() },
            |h| fso_fade_cdf(h, &cfg).unwrap(),
        ),
    ));
    let at_zero: Vec<f64> = (0..N_KS)
        .map(|_| sample_fso_fade(&mut rng, &cfg, FsoDeficit::AtZero).fade)
        .collect();
    stats.push((
        "fso fade (deficit at zero)",
        ks_statistic(
            at_zero,
            |h| if h < 0.0 { 0.0 } else { 1.0 - mass + fso_fade_cdf(h, &cfg).unwrap() },
            |h| if h <= 0.0 { 0.0 } else { 1.0 - mass + fso_fade_cdf(h, &cfg).unwrap() },
        ),
    ));

    for (label, d) in &stats {
        pass &= *d < KS_CRITICAL_1E5;
        notes.push(format!("KS {label} {d:.5}"));
    }
    outcome(pass, notes.join("; "))
}

/// `s` with `-ln L(s) = exponent`, by bisection on `ln s`.
fn s_for_exponent(exponent: f64, cfg: &NetworkConfig) -> f64 {
    let f = |ln_s: f64| -laplace_interference(ln_s.exp(), cfg).unwrap().ln() - exponent;
    let (mut lo, mut hi) = (-10.0_f64, 10.0_f64);
    while f(lo) > 0.0 {
        lo -= 10.0;
    }
    while f(hi) < 0.0 {
        hi += 10.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn criterion_2() -> Outcome {
    let cfg = desk();
    let g = cfg.geometry();
    let samples: Vec<f64> = (0..N_KS as u64)
        .into_par_iter()
        .map(|k| sample_interference(&mut round_rng(21, k), &cfg, &g))
        .collect();
    let mut pass = true;
    let mut notes = Vec::new();
    for e in logspace(0.01, 3.0, 5) {
        let s = s_for_exponent(e, &cfg);
        let analytic = laplace_interference(s, &cfg).unwrap();
        let empirical = samples.iter().map(|i| (-s * i).exp()).sum::<f64>() / samples.len() as f64;
        let gap = rel_gap(analytic, empirical);
        pass &= gap <= 0.01;
        notes.push(format!("exponent {e:.3}: L {analytic:.5} mc {empirical:.5} gap {:.3}%", 100.0 * gap));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let cfg = desk();
    let g = cfg.geometry();
    let mut pass = true;
    let mut notes = Vec::new();
    for frac in [0.1, 0.5, 0.9] {
        let theta = frac * g.theta_max;
        let ctx = ZContext::new(theta, &cfg).unwrap();
        let mut z: Vec<f64> = (0..N_KS as u64)
            .into_par_iter()
            .map(|k| sample_z(&mut round_rng(31, k), theta, &cfg, &g))
            .collect();
        z.sort_by(f64::total_cmp);
        let n = z.len() as f64;
        let mut worst: f64 = 0.0;
        for q in 0..20 {
            let p = 0.025 + 0.95 * q as f64 / 19.0;
            let zq = z[((p * n) as usize).min(z.len() - 1)];
            let empirical = z.iter().filter(|&&x| x > zq).count() as f64 / n;
            let analytic = ccdf_z(zq.min(1.0), &ctx, &cfg).unwrap();
            worst = worst.max((analytic - empirical).abs());
        }
        pass &= worst <= 0.02;
        notes.push(format!("θ = {frac}·θmax: max gap {worst:.4}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_4() -> Outcome {
    let cfg = desk();
    let analytic = analytic_metrics(&cfg).unwrap().aadr;
    let est = mc(&cfg);
    let linear = rel_gap(analytic, est.aadr_linear.mean);
    let exact = rel_gap(analytic, est.aadr_exact.mean);
    outcome(
        linear <= 0.015 && exact <= 0.05,
        format!(
            "analytic {:.5e}, linear mc {:.5e} gap {:.2}%, exact mc {:.5e} gap {:.2}%",
            analytic,
            est.aadr_linear.mean,
            100.0 * linear,
            est.aadr_exact.mean,
            100.0 * exact
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, cfg) in [
        ("defaults", desk()),
        ("N_s = 100", desk().with_sat_count(100)),
        ("1500 km", desk().with_sat_altitude(1500e3)),
    ] {
        let analytic = abdr(&cfg).unwrap();
        let est = mc(&cfg);
        let gap = rel_gap(analytic, est.abdr.mean);
        pass &= gap <= 0.01;
        notes.push(format!(
            "{label}: analytic {analytic:.4e} mc {:.4e} ± {:.1e} gap {:.2}%",
            est.abdr.mean,
            est.abdr.half_width,
            100.0 * gap
        ));
    }
    let cfg = desk();
    let ratio = abdr(&cfg.clone().with_hap_tx_power(10.0 * cfg.hap_tx_power)).unwrap() / abdr(&cfg).unwrap();
    pass &= (9.9..=10.0).contains(&ratio);
    notes.push(format!("abdr(10P)/abdr(P) {ratio:.5}"));
    outcome(pass, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for dbw in [5.0, 15.0, 25.0] {
        let cfg = desk().with_hap_tx_power(dbw_to_watts(dbw));
        let analytic = analytic_metrics(&cfg).unwrap().brep;
        let est = mc(&cfg);
        let gap = (analytic - est.brep.mean).abs();
        pass &= gap <= 0.03;
        notes.push(format!("{dbw} dBW: analytic {analytic:.4} mc {:.4}", est.brep.mean));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let cfg = NetworkConfig::default().with_sat_altitude(500e3).with_sat_count(300);
    let opts = PlannerOptions::default();
    let half = min_power_for_brep(&cfg, 0.5, &opts);
    let ninety = min_power_for_brep(&cfg, 0.9, &opts);
    match (half, ninety) {
        (Ok(h), Ok(n)) => outcome(
            h.min_power_dbw < 10.0 && (21.0..=27.0).contains(&n.min_power_dbw),
            format!(
                "BREP 0.5 needs {:.2} dBW (< 10), BREP 0.9 needs {:.2} dBW (21..27)",
                h.min_power_dbw, n.min_power_dbw
            ),
        ),
        (h, n) => outcome(false, format!("planner error: {h:?} / {n:?}")),
    }
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn criterion_8() -> Outcome {
    let base = desk();
    let mut checks: Vec<(String, bool)> = Vec::new();

    let access = AccessAnalysis::new(&base).unwrap();
    let factors = BrepFactors::new(&base, &access).unwrap();
    let powers: Vec<f64> = [5.0, 15.0, 25.0, 65.0, 70.0, 75.0, 80.0].map(dbw_to_watts).to_vec();
    let brep_p: Vec<f64> = powers.iter().map(|&p| factors.brep_at(p)).collect();
    let abdr_p: Vec<f64> = powers
        .iter()
        .map(|&p| abdr(&base.clone().with_hap_tx_power(p)).unwrap())
        .collect();
    checks.push(("BREP nondecreasing in power".into(), nondecreasing(&brep_p)));
    checks.push(("ABDR nondecreasing in power".into(), nondecreasing(&abdr_p)));

    // BREP is flat at zero for small powers; compare at an interior power.
    let interior = dbw_to_watts(70.0);
    let brep_of = |cfg: NetworkConfig| analytic_metrics(&cfg.with_hap_tx_power(interior)).unwrap().brep;
    let abdr_of = |cfg: NetworkConfig| abdr(&cfg).unwrap();

    let altitudes = [500e3, 1000e3, 1500e3];
    let abdr_h: Vec<f64> = altitudes.iter().map(|&h| abdr_of(base.clone().with_sat_altitude(h))).collect();
    let brep_h: Vec<f64> = altitudes.iter().map(|&h| brep_of(base.clone().with_sat_altitude(h))).collect();
    checks.push(("ABDR decreasing in altitude".into(), decreasing(&abdr_h)));
    checks.push(("BREP decreasing in altitude".into(), decreasing(&brep_h)));

    let counts = [100, 300, 720];
    let abdr_n: Vec<f64> = counts.iter().map(|&n| abdr_of(base.clone().with_sat_count(n))).collect();
    let brep_n: Vec<f64> = counts.iter().map(|&n| brep_of(base.clone().with_sat_count(n))).collect();
    checks.push(("ABDR increasing in N_s".into(), increasing(&abdr_n)));
    checks.push(("BREP increasing in N_s".into(), increasing(&brep_n)));

    let opts = PlannerOptions::default();
    let brep_power = |cfg: &NetworkConfig| min_power_for_brep(cfg, 0.5, &opts).unwrap().min_power_dbw;
    let ratio_power = |cfg: &NetworkConfig| min_power_for_abdr_ratio(cfg, 1.0, &opts).unwrap().min_power_dbw;
    let by_altitude: Vec<NetworkConfig> = altitudes.iter().map(|&h| base.clone().with_sat_altitude(h)).collect();
    let by_count: Vec<NetworkConfig> = counts.iter().map(|&n| base.clone().with_sat_count(n)).collect();
    checks.push((
        "BREP power increasing in altitude".into(),
        increasing(&by_altitude.iter().map(brep_power).collect::<Vec<_>>()),
    ));
    checks.push((
        "ratio power increasing in altitude".into(),
        increasing(&by_altitude.iter().map(ratio_power).collect::<Vec<_>>()),
    ));
    checks.push((
        "BREP power decreasing in N_s".into(),
        decreasing(&by_count.iter().map(brep_power).collect::<Vec<_>>()),
    ));
    checks.push((
        "ratio power decreasing in N_s".into(),
        decreasing(&by_count.iter().map(ratio_power).collect::<Vec<_>>()),
    ));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    let detail = if failed.is_empty() {
        format!("{} trend checks hold", checks.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    outcome(failed.is_empty(), detail)
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut worst_mass: f64 = 0.0;
    for sigma0 in [1e-3, 1e-2, 0.1, 0.5, 1.0] {
        let s2 = sigma0 * sigma0;
        let oracle = integrate(
            |t| t * t.cos() * (-t * t / (2.0 * s2)).exp(),
            0.0,
            40.0 * sigma0,
            Tolerance::relative(1e-14),
        )
        .unwrap()
        .value
            / s2;
        worst_mass = worst_mass.max(rel_gap(cos_weighted_rayleigh_mass(sigma0).unwrap(), oracle));
    }
    pass &= worst_mass <= 1e-9;

    let r = 0.5 * NetworkConfig::default().pointing_shape.powi(2);
    let mut worst_series: f64 = 0.0;
    for x in [0.1_f64, 1.0, 5.0] {
        let series = binomial_series(r, (-x).exp(), 1e-15, 1_000_000).unwrap().value;
        worst_series = worst_series.max((series - (-(-x).exp_m1()).powf(r)).abs());
    }
    pass &= worst_series <= 1e-8;
    outcome(
        pass,
        format!("1F1 max relative error {worst_mass:.1e}; binomial series max error {worst_series:.1e}"),
    )
}

fn criterion_10() -> Outcome {
    let cfg = desk();
    let serial = estimate_metrics(
        &cfg,
        &SimulationOptions {
            rounds: MC_ROUNDS,
            seed: SEED,
            parallel: false,
            ..SimulationOptions::default()
        },
    )
    .unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let parallel = pool
        .install(|| {
            estimate_metrics(
                &cfg,
                &SimulationOptions {
                    rounds: MC_ROUNDS,
                    seed: SEED,
                    parallel: true,
                    ..SimulationOptions::default()
                },
            )
        })
        .unwrap();
    let a = serde_json::to_string(&serial).unwrap();
    let b = serde_json::to_string(&parallel).unwrap();
    let bits = |e: &sagin_relay::montecarlo::MetricsEstimate| {
        [e.aadr_exact, e.aadr_linear, e.abdr, e.brep]
            .iter()
            .flat_map(|x| [x.mean.to_bits(), x.half_width.to_bits()])
            .collect::<Vec<_>>()
    };
    outcome(
        a == b && bits(&serial) == bits(&parallel),
        format!("{MC_ROUNDS} rounds, serial vs 8 threads"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("distributions", criterion_1),
        ("interference Laplace transform", criterion_2),
        ("SINR-ratio CCDF", criterion_3),
        ("AADR", criterion_4),
        ("ABDR", criterion_5),
        ("BREP", criterion_6),
        ("power anchors", criterion_7),
        ("monotonicity", criterion_8),
        ("special functions", criterion_9),
        ("determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        if !result.pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} {} {name} ({:.1} s): {}",
            if result.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
