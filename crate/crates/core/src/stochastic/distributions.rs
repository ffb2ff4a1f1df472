use crate::model::{one_minus_cos, DerivedGeometry, NetworkConfig};

/// Density of the distance between a uniformly placed user in the cap and
/// the HAP: linear in `d` on `[H, d_max]`.
pub fn user_distance_pdf(d: f64, geom: &DerivedGeometry) -> f64 {
    if d < geom.hap_altitude || d > geom.d_max {
        return 0.0;
    }
    d / (geom.earth_radius * geom.hap_sphere_radius * geom.one_minus_cos_theta_max())
}

pub fn user_distance_cdf(d: f64, geom: &DerivedGeometry) -> f64 {
    let h2 = geom.hap_altitude * geom.hap_altitude;
    if d <= geom.hap_altitude {
        return 0.0;
    }
    if d >= geom.d_max {
        return 1.0;
    }
    (d * d - h2) / (geom.d_max * geom.d_max - h2)
}

/// CDF of a user's polar angle, `(1 − cos θ) / (1 − cos θ_max)`.
pub fn user_polar_angle_cdf(theta: f64, geom: &DerivedGeometry) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    if theta >= geom.theta_max {
        return 1.0;
    }
    one_minus_cos(theta) / geom.one_minus_cos_theta_max()
}

/// Density of the contact angle (polar angle of the nearest of `n` uniform
/// points on a sphere).
pub fn contact_angle_pdf(theta: f64, n: u32) -> f64 {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return 0.0;
    }
    let half_one_plus_cos = 0.5 * (1.0 + theta.cos());
    0.5 * n as f64 * theta.sin() * half_one_plus_cos.powi(n as i32 - 1)
}

/// `P(θ_c ≤ θ) = 1 − ((1 + cos θ)/2)^n`.
pub fn contact_angle_cdf(theta: f64, n: u32) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    if theta >= std::f64::consts::PI {
        return 1.0;
    }
    1.0 - (0.5 * (1.0 + theta.cos())).powi(n as i32)
}

/// `((R_H + R_s)² − d²) / (4 R_H R_s)`, which equals `(1 + cos θ_c)/2` for the
/// contact angle at distance `d`.
fn half_one_plus_cos_at(d: f64, cfg: &NetworkConfig) -> f64 {
    let rh = cfg.hap_sphere_radius();
    let rs = cfg.sat_shell_radius;
    ((rh + rs).powi(2) - d * d) / (4.0 * rh * rs)
}

/// Density of the distance from the HAP to its nearest satellite without
/// any visibility truncation, supported on `[R_s − R_H, R_s + R_H]`.
pub fn nearest_sat_distance_pdf_unbounded(d: f64, cfg: &NetworkConfig) -> f64 {
    let rh = cfg.hap_sphere_radius();
    let rs = cfg.sat_shell_radius;
    if d < rs - rh || d > rs + rh {
        return 0.0;
    }
    let n = cfg.sat_count;
    let base = half_one_plus_cos_at(d, cfg);
    n as f64 * d / (2.0 * rh * rs) * base.powi(n as i32 - 1)
}

/// Nearest-satellite distance density restricted to the unobstructed range
/// `[R_s − R_H, d_H2s^max]`. Not renormalized: it integrates to
/// `1 − blockage_probability`.
pub fn nearest_sat_distance_pdf(d: f64, cfg: &NetworkConfig) -> f64 {
    if d > cfg.geometry().fso_d_max {
        return 0.0;
    }
    nearest_sat_distance_pdf_unbounded(d, cfg)
}

/// `P(d_s ≤ d)` for the nearest-satellite distance (no truncation).
pub fn nearest_sat_distance_cdf(d: f64, cfg: &NetworkConfig) -> f64 {
    let rh = cfg.hap_sphere_radius();
    let rs = cfg.sat_shell_radius;
    if d <= rs - rh {
        return 0.0;
    }
    if d >= rs + rh {
        return 1.0;
    }
    1.0 - half_one_plus_cos_at(d, cfg).powi(cfg.sat_count as i32)
}

/// Probability that even the nearest satellite is hidden behind the Earth.
pub fn blockage_probability(cfg: &NetworkConfig) -> f64 {
    let d_vis = cfg.geometry().fso_d_max;
    let rh = cfg.hap_sphere_radius();
    let rs = cfg.sat_shell_radius;
    if d_vis >= rs + rh {
        return 0.0;
    }
    half_one_plus_cos_at(d_vis, cfg).powi(cfg.sat_count as i32)
}
