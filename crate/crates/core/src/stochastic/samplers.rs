use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::model::{DerivedGeometry, NetworkConfig};

/// One ground user of a realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserRealization {
    pub polar_angle: f64,
    /// Not used by any metric; kept for traces.
    pub azimuth: f64,
    pub distance: f64,
    /// Squared shadowed-Rician envelope `h²_RF`.
    pub rf_fade_power: f64,
}

/// The nearest satellite of a realization together with its FSO fade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteRealization {
    pub contact_angle: f64,
    pub distance: f64,
    /// Line of sight not obstructed by the Earth.
    pub visible: bool,
    pub fso_fade: f64,
    pub deviation_angle: f64,
}

/// Where the probability mass `1 − E[cos θ_d]` missing from the conditional
/// misalignment density is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsoDeficit {
    /// At `h = A₀`. Consistent with the closed-form BREP.
    #[default]
    AtCap,
    /// At `h = 0`: a pointing failure loses the link.
    AtZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatelliteSampling {
    /// Place all `N_s` satellites and take the closest.
    FullBpp,
    /// Draw the contact angle directly by inversion.
    #[default]
    ContactAngle,
}

/// Uniform on `(0, 1]`, safe to take the logarithm of.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Draws `h²_RF ~ Gamma(shape m1, scale m2)`.
///
/// # Panics
/// If `m1` or `m2` is not positive and finite.
pub fn sample_rf_fade<R: Rng + ?Sized>(rng: &mut R, m1: f64, m2: f64) -> f64 {
    Gamma::new(m1, m2)
        .expect("gamma parameters must be positive")
        .sample(rng)
}

/// Draws one realization of the user PPP in the served cap.
pub fn sample_users<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    geom: &DerivedGeometry,
) -> Vec<UserRealization> {
    let mean = geom.mean_user_count;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count: f64 = Poisson::new(mean).expect("finite mean").sample(rng);
    let gamma = Gamma::new(cfg.rician_shape as f64, cfg.rician_scale).expect("validated config");
    let omc_max = geom.one_minus_cos_theta_max();
    let h2 = geom.hap_altitude * geom.hap_altitude;
    let k = 2.0 * geom.earth_radius * geom.hap_sphere_radius;
    (0..count as usize)
        .map(|_| {
            // 1 − cos θ is uniform on [0, 1 − cos θ_max].
            let omc = rng.random::<f64>() * omc_max;
            let azimuth = rng.random::<f64>() * std::f64::consts::TAU;
            UserRealization {
                polar_angle: 2.0 * (0.5 * omc).sqrt().asin(),
                azimuth,
                distance: (h2 + k * omc).sqrt(),
                rf_fade_power: gamma.sample(rng),
            }
        })
        .collect()
}

/// A misalignment draw: deviation angle and resulting FSO fade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoFadeDraw {
    pub deviation_angle: f64,
    pub fade: f64,
}

pub fn sample_fso_fade<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    mode: FsoDeficit,
) -> FsoFadeDraw {
    let deviation_angle = cfg.deviation_std * (-2.0 * open_unit(rng).ln()).sqrt();
    let accept = deviation_angle.cos().max(0.0);
    let a0 = cfg.pointing_cap;
    let fade = if rng.random::<f64>() < accept {
        a0 * rng.random::<f64>().powf(1.0 / (cfg.pointing_shape * cfg.pointing_shape))
    } else {
        match mode {
            FsoDeficit::AtCap => a0,
            FsoDeficit::AtZero => 0.0,
        }
    };
    FsoFadeDraw {
        deviation_angle,
        fade,
    }
}

/// `1 − cos θ_c` of the nearest of `cfg.sat_count` uniform satellites.
fn sample_contact_one_minus_cos<R: Rng + ?Sized>(
    rng: &mut R,
    n: u32,
    method: SatelliteSampling,
) -> f64 {
    match method {
        SatelliteSampling::ContactAngle => {
            // cos θ_c = 2U^{1/N} − 1
            -2.0 * (open_unit(rng).ln() / n as f64).exp_m1()
        }
        SatelliteSampling::FullBpp => {
            let mut best = -1.0_f64;
            for _ in 0..n {
                let x: f64 = StandardNormal.sample(rng);
                let y: f64 = StandardNormal.sample(rng);
                let z: f64 = StandardNormal.sample(rng);
                let norm = (x * x + y * y + z * z).sqrt();
                if norm > 0.0 {
                    best = best.max(x / norm);
                }
            }
            1.0 - best
        }
    }
}

pub fn sample_nearest_satellite<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    method: SatelliteSampling,
    deficit: FsoDeficit,
) -> SatelliteRealization {
    let rh = cfg.hap_sphere_radius();
    let rs = cfg.sat_shell_radius;
    let omc = sample_contact_one_minus_cos(rng, cfg.sat_count, method);
    let distance = ((rs - rh).powi(2) + 2.0 * rh * rs * omc).sqrt();
    let fso = sample_fso_fade(rng, cfg, deficit);
    SatelliteRealization {
        contact_angle: 2.0 * (0.5 * omc).sqrt().min(1.0).asin(),
        distance,
        visible: distance <= cfg.geometry().fso_d_max,
        fso_fade: fso.fade,
        deviation_angle: fso.deviation_angle,
    }
}
