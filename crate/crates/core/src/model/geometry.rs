use serde::{Deserialize, Serialize};

use super::config::NetworkConfig;

/// Quantities fixed by the config: the service cap of the HAP and the
/// range of possible HAP–satellite distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    pub earth_radius: f64,
    /// `R_H = R_⊕ + H`.
    pub hap_sphere_radius: f64,
    pub hap_altitude: f64,
    /// Polar half-angle of the served cap, radians.
    pub theta_max: f64,
    /// Largest user–HAP distance.
    pub d_max: f64,
    /// Shortest possible HAP–satellite distance, `R_s − R_H`.
    pub fso_d_min: f64,
    /// Longest unobstructed HAP–satellite distance.
    pub fso_d_max: f64,
    /// Area of the served spherical cap, m².
    pub cap_area: f64,
    /// Expected number of users in the cap.
    pub mean_user_count: f64,
}

impl DerivedGeometry {
    /// `1 − cos θ_max`, computed without cancellation.
    pub fn one_minus_cos_theta_max(&self) -> f64 {
        one_minus_cos(self.theta_max)
    }

    /// User–HAP distance for a user at polar angle `theta` (cosine rule).
    pub fn user_distance(&self, theta: f64) -> f64 {
        let h = self.hap_altitude;
        (h * h + 2.0 * self.earth_radius * self.hap_sphere_radius * one_minus_cos(theta)).sqrt()
    }
}

pub(crate) fn one_minus_cos(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * s * s
}

/// Derives the cap geometry. The coverage radius is read as a geodesic
/// ground radius, so `θ_max = r_H / R_⊕`.
pub fn derive_geometry(cfg: &NetworkConfig) -> DerivedGeometry {
    let re = cfg.earth_radius;
    let rh = cfg.hap_sphere_radius();
    let rs = cfg.sat_shell_radius;
    let theta_max = cfg.hap_coverage_radius / re;
    let omc = one_minus_cos(theta_max);
    // d² = R⊕² + R_H² − 2R⊕R_H cos θ = H² + 2R⊕R_H(1 − cos θ)
    let d_max = (cfg.hap_altitude.powi(2) + 2.0 * re * rh * omc).sqrt();
    let fso_d_max = (rh * rh - re * re).sqrt() + (rs * rs - re * re).sqrt();
    let cap_area = 2.0 * std::f64::consts::PI * re * re * omc;
    DerivedGeometry {
        earth_radius: re,
        hap_sphere_radius: rh,
        hap_altitude: cfg.hap_altitude,
        theta_max,
        d_max,
        fso_d_min: rs - rh,
        fso_d_max,
        cap_area,
        mean_user_count: cfg.user_density * cap_area,
    }
}

/// Inverse of the cosine rule: the cap half-angle whose rim is `d_max` away
/// from the HAP.
pub fn theta_max_from_d_max(d_max: f64, earth_radius: f64, hap_sphere_radius: f64) -> f64 {
    let h = hap_sphere_radius - earth_radius;
    let ratio = (d_max * d_max - h * h) / (4.0 * earth_radius * hap_sphere_radius);
    2.0 * ratio.max(0.0).sqrt().asin()
}
