#![allow(dead_code)]

use sagin_relay::NetworkConfig;

/// Kolmogorov-Smirnov critical value at n = 1e5, α = 0.01.
pub const KS_CRITICAL_1E5: f64 = 0.00515;

/// Users per m² at desk scale.
pub const DESK_DENSITY: f64 = 1e-8;

pub fn desk() -> NetworkConfig {
    NetworkConfig::default().with_user_density(DESK_DENSITY)
}

/// One-sample KS statistic. `cdf_left(x)` is `P(X < x)`; it differs from
/// `cdf` only at atoms, where tied samples are compared on both sides.
pub fn ks_statistic(
    mut samples: Vec<f64>,
    cdf: impl Fn(f64) -> f64,
    cdf_left: impl Fn(f64) -> f64,
) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < samples.len() {
        let x = samples[i];
        let mut j = i;
        while j < samples.len() && samples[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - cdf_left(x)).abs());
        d = d.max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    d
}

pub fn ks_continuous(samples: Vec<f64>, cdf: impl Fn(f64) -> f64 + Copy) -> f64 {
    ks_statistic(samples, cdf, cdf)
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
