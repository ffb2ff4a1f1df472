mod common;

use sagin_relay::montecarlo::{
    estimate_metrics, evaluate_round, export_trace, load_trace, simulate, summarize, RoundInputs,
    SimulationOptions,
};
use sagin_relay::stochastic::{SatelliteRealization, UserRealization};
use sagin_relay::NetworkConfig;

use common::*;

fn opts(rounds: usize) -> SimulationOptions {
    SimulationOptions {
        rounds,
        ..SimulationOptions::default()
    }
}

#[test]
fn pinned_round_matches_hand_link_budget() {
    let cfg = NetworkConfig::default();
    let user = UserRealization {
        polar_angle: 0.0,
        azimuth: 0.0,
        distance: 20e3,
        rf_fade_power: 1.0,
    };
    let satellite = SatelliteRealization {
        contact_angle: 0.0,
        distance: 480e3,
        visible: true,
        fso_fade: 0.01979,
        deviation_angle: 0.0,
    };
    let out = evaluate_round(
        0,
        &RoundInputs {
            users: vec![user],
            satellite,
        },
        &cfg,
    );

    // 20 W, 8 dBi, 32 dBi, 2 GHz, 20 km, noise 2e-14 W, 1 GHz.
    let wavelength = 299_792_458.0 / 2e9;
    let received = 20.0 * 10f64.powf(0.8) * 10f64.powf(3.2) * (wavelength / (4.0 * std::f64::consts::PI)).powi(2)
        / (20e3_f64).powi(2);
    let access = 1e9 * (1.0 + received / 2e-14).log2();
    // 100 W, 52 dBi, 42 dBi, υ = 0.5, 1550 nm, σ_s² = 1.5e-12 W, 100 GHz.
    let k = 0.5 * 1550e-9 / (4.0 * std::f64::consts::PI * 1.5e-12_f64.sqrt());
    let snr = 100.0 * 10f64.powf(5.2) * 10f64.powf(4.2) * k * k * (0.01979_f64 / 480e3).powi(2);
    // The SNR is ~1e-5, so log₂(1 + x) is taken through ln_1p to keep digits.
    let backhaul = 100e9 * snr.ln_1p() / std::f64::consts::LN_2;

    assert!(rel_gap(out.interference, received) < 1e-12);
    assert!(rel_gap(out.access_rate_exact, access) < 1e-12);
    assert!(rel_gap(out.backhaul_rate, backhaul) < 1e-12);
    assert_eq!(out.exceeded, backhaul > access);
}

#[test]
fn brep_half_width_within_binomial_bound() {
    let est = estimate_metrics(&desk(), &opts(10_000)).unwrap();
    assert!(est.brep.half_width <= 0.01);
}

#[test]
fn same_seed_gives_identical_estimates() {
    let a = estimate_metrics(&desk(), &opts(2_000)).unwrap();
    let b = estimate_metrics(&desk(), &opts(2_000)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn quadrupling_rounds_halves_half_widths() {
    let cfg = desk();
    let small = estimate_metrics(&cfg, &opts(2_500)).unwrap();
    let large = estimate_metrics(&cfg, &opts(10_000)).unwrap();
    for (a, b) in [
        (small.aadr_exact, large.aadr_exact),
        (small.aadr_linear, large.aadr_linear),
        (small.abdr, large.abdr),
    ] {
        let ratio = b.half_width / a.half_width;
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn brep_is_the_exceedance_frequency() {
    let cfg = desk().with_hap_tx_power(sagin_relay::model::units::dbw_to_watts(72.0));
    let o = opts(1_000);
    let outcomes = simulate(&cfg, &o).unwrap();
    let est = summarize(&outcomes, o.seed, cfg.config_hash());
    let hits = outcomes.iter().filter(|r| r.exceeded).count();
    assert!(hits > 0 && hits < outcomes.len());
    assert_eq!(est.brep.mean, hits as f64 / outcomes.len() as f64);
}

#[test]
fn trace_round_trip() {
    let cfg = desk();
    let dir = tempfile::tempdir().unwrap();

    let short = simulate(&cfg, &opts(3)).unwrap();
    let path = dir.path().join("short.csv");
    export_trace(&short, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 4);

    let o = opts(500);
    let outcomes = simulate(&cfg, &o).unwrap();
    let est = summarize(&outcomes, o.seed, cfg.config_hash());
    let path = dir.path().join("trace.csv");
    export_trace(&outcomes, &path).unwrap();
    let reloaded = load_trace(&path).unwrap();
    let again = summarize(&reloaded, o.seed, cfg.config_hash());
    for (a, b) in [
        (est.aadr_exact.mean, again.aadr_exact.mean),
        (est.aadr_linear.mean, again.aadr_linear.mean),
        (est.abdr.mean, again.abdr.mean),
    ] {
        assert!(rel_gap(b, a) <= 1e-9);
    }
    assert_eq!(est.brep.mean, again.brep.mean);
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = desk();
    let serial = estimate_metrics(
        &cfg,
        &SimulationOptions {
            parallel: false,
            ..opts(1_000)
        },
    )
    .unwrap();
    for threads in [2, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let par = pool.install(|| estimate_metrics(&cfg, &opts(1_000))).unwrap();
        assert_eq!(serde_json::to_string(&serial).unwrap(), serde_json::to_string(&par).unwrap());
    }
}
