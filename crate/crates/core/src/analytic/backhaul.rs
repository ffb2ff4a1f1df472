use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::access::AccessAnalysis;
use crate::error::Result;
use crate::model::NetworkConfig;
use crate::quadrature::{integrate, Integral, Tolerance};
use crate::special::{cos_weighted_rayleigh_mass, sum_series, SeriesResult};
use crate::stochastic::{blockage_probability, nearest_sat_distance_pdf};

/// Relative stopping tolerance of the BREP series.
pub const BREP_SERIES_REL_TOL: f64 = 1e-12;
/// Hard cap on BREP series terms. The terms decay like `n^(-3/2) e^(-κ n E)`
/// with `κ = B_RF / B_FSO`, so a cap of a few hundred terms is far from
/// converged when the bandwidth ratio is small.
pub const BREP_SERIES_MAX_TERMS: usize = 20_000;

/// Total mass of the continuous part of the FSO fade, `E[max(cos θ_d, 0)]`.
pub fn fso_continuous_mass(cfg: &NetworkConfig) -> Result<f64> {
    cos_weighted_rayleigh_mass(cfg.deviation_std)
}

/// Density of the continuous part of `h_FSO` on `[0, A₀]`.
pub fn fso_fade_pdf(h: f64, cfg: &NetworkConfig) -> Result<f64> {
    let a0 = cfg.pointing_cap;
    if !(0.0..=a0).contains(&h) {
        return Ok(0.0);
    }
    let eta2 = cfg.pointing_shape * cfg.pointing_shape;
    Ok(eta2 / a0.powf(eta2) * h.powf(eta2 - 1.0) * fso_continuous_mass(cfg)?)
}

/// `P(h_FSO ≤ h)` over the continuous part; saturates at the continuous
/// mass for `h ≥ A₀`.
pub fn fso_fade_cdf(h: f64, cfg: &NetworkConfig) -> Result<f64> {
    if h <= 0.0 {
        return Ok(0.0);
    }
    let ratio = (h / cfg.pointing_cap).min(1.0);
    Ok(ratio.powf(cfg.pointing_shape * cfg.pointing_shape) * fso_continuous_mass(cfg)?)
}

/// `G₀` such that the backhaul SNR is `G₀ (h / d_s)²`.
pub fn fso_snr_gain(cfg: &NetworkConfig) -> f64 {
    let k = cfg.oe_coeff * cfg.fso_wavelength / (4.0 * PI * cfg.sat_noise.sqrt());
    cfg.hap_tx_power * cfg.hap_tx_gain * cfg.sat_gain * k * k
}

/// `∫ d^p f_{d_s}(d) dd` over the unobstructed distances.
pub fn ds_moment(p: f64, cfg: &NetworkConfig) -> Result<f64> {
    let g = cfg.geometry();
    Ok(integrate(
        |d| d.powf(p) * nearest_sat_distance_pdf(d, cfg),
        g.fso_d_min,
        g.fso_d_max,
        Tolerance::relative(1e-12),
    )?
    .value)
}

/// ABDR together with the outer quadrature error estimate.
pub fn abdr_integral(cfg: &NetworkConfig) -> Result<Integral> {
    let g = cfg.geometry();
    let mass = fso_continuous_mass(cfg)?;
    let eta2 = cfg.pointing_shape * cfg.pointing_shape;
    let peak = fso_snr_gain(cfg) * cfg.pointing_cap * cfg.pointing_cap;
    if peak == 0.0 {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let mut failure = None;
    let outer = integrate(
        |t| {
            let f = nearest_sat_distance_pdf(t, cfg);
            if f == 0.0 {
                return 0.0;
            }
            // h = A₀ u^(1/η²) turns the fade density into the constant M.
            let snr = peak / (t * t);
            let inner = integrate(
                |u| (snr * u.powf(2.0 / eta2)).ln_1p(),
                0.0,
                1.0,
                Tolerance::relative(1e-12),
            );
            match inner {
                Ok(i) => f * mass * i.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        g.fso_d_min,
        g.fso_d_max,
        Tolerance::relative(1e-10),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = cfg.fso_bandwidth / LN_2;
    Ok(Integral {
        value: scale * outer.value,
        abs_error: scale * outer.abs_error,
        evaluations: outer.evaluations,
    })
}

/// Average backhaul data rate, bit/s. Blocked realizations contribute zero.
pub fn abdr(cfg: &NetworkConfig) -> Result<f64> {
    Ok(abdr_integral(cfg)?.value)
}

/// Largest BREP the model can deliver at any power: the link must be
/// unobstructed and the beam must not suffer a pointing failure.
pub fn brep_ceiling(cfg: &NetworkConfig) -> Result<f64> {
    Ok(fso_continuous_mass(cfg)? * (1.0 - blockage_probability(cfg)))
}

/// Everything in the closed-form BREP except its dependence on the HAP
/// transmit power, which enters only through `ε^(η²) ∝ P^(−η²/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrepFactors {
    /// `M(σ₀) / A₀^(η²)`.
    pub fade_factor: f64,
    /// `E[d_s^(η²)]` over unobstructed distances.
    pub distance_moment: f64,
    /// `ε √P = 4π σ_s / (λ_FSO υ √(G_H^t G_s))`.
    pub epsilon_at_unit_power: f64,
    pub eta_squared: f64,
    pub series: SeriesResult,
    pub ceiling: f64,
}

impl BrepFactors {
    pub fn new(cfg: &NetworkConfig, access: &AccessAnalysis) -> Result<Self> {
        let eta2 = cfg.pointing_shape * cfg.pointing_shape;
        let r = 0.5 * eta2;
        let mass = fso_continuous_mass(cfg)?;
        let series = if access.profiles.is_empty() {
            // No users: every factor is 1 and the series is (1 − 1)^r.
            SeriesResult {
                value: 0.0,
                terms_used: 1,
                truncation_bound: 0.0,
            }
        } else {
            interference_series(r, cfg.rf_bandwidth / cfg.fso_bandwidth, access)
        };
        Ok(BrepFactors {
            fade_factor: mass / cfg.pointing_cap.powf(eta2),
            distance_moment: ds_moment(eta2, cfg)?,
            epsilon_at_unit_power: 4.0 * PI * cfg.sat_noise.sqrt()
                / (cfg.fso_wavelength * cfg.oe_coeff * (cfg.hap_tx_gain * cfg.sat_gain).sqrt()),
            eta_squared: eta2,
            series,
            ceiling: brep_ceiling(cfg)?,
        })
    }

    /// Unclamped closed-form value at HAP transmit power `power` (W).
    pub fn raw_brep_at(&self, power: f64) -> f64 {
        if power <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let epsilon = self.epsilon_at_unit_power / power.sqrt();
        1.0 - self.fade_factor * epsilon.powf(self.eta_squared) * self.distance_moment * self.series.value
    }

    /// BREP at `power`, clamped to `[0, ceiling]`.
    pub fn brep_at(&self, power: f64) -> f64 {
        self.raw_brep_at(power).clamp(0.0, self.ceiling)
    }
}

/// `Σₙ (−1)ⁿ C(r, n) exp(−2πΛR² ∫ (1 − E[e^(cₙ Z)]) sin θ dθ)` with
/// `cₙ = κ (r − n)`.
fn interference_series(r: f64, kappa: f64, access: &AccessAnalysis) -> SeriesResult {
    // Per z node: a = w F̄ e^(κ r z) and q = e^(−κ z), so that
    // ∫ e^(cₙ z) F̄ dz = Σ a qⁿ.
    struct Node {
        weight: f64,
        current: Vec<f64>,
        ratio: Vec<f64>,
    }
    let mut nodes: Vec<Node> = access
        .cap_rule
        .weights
        .iter()
        .zip(&access.profiles)
        .map(|(w, p)| Node {
            weight: *w,
            current: p
                .rule
                .nodes
                .iter()
                .zip(&p.rule.weights)
                .zip(&p.ccdf)
                .map(|((z, wz), f)| wz * f * (kappa * r * z).exp())
                .collect(),
            ratio: p.rule.nodes.iter().map(|z| (-kappa * z).exp()).collect(),
        })
        .collect();
    let mut coeff = 1.0;
    let mut step = 0;
    sum_series(
        |n| {
            while step < n {
                step += 1;
                coeff *= -(r - (step - 1) as f64) / step as f64;
                for node in &mut nodes {
                    for (a, q) in node.current.iter_mut().zip(&node.ratio) {
                        *a *= q;
                    }
                }
            }
            let c = kappa * (r - n as f64);
            // 1 − E[e^(cZ)] = −c ∫ e^(cz) F̄ dz
            let integral: f64 = nodes
                .iter()
                .map(|node| node.weight * -c * node.current.iter().sum::<f64>())
                .sum();
            coeff * (-access.prefactor * integral).exp()
        },
        BREP_SERIES_REL_TOL,
        BREP_SERIES_MAX_TERMS,
    )
}

/// Closed-form backhaul rate exceedance probability at the configured HAP
/// power.
pub fn brep(cfg: &NetworkConfig) -> Result<f64> {
    let access = AccessAnalysis::new(cfg)?;
    Ok(BrepFactors::new(cfg, &access)?.brep_at(cfg.hap_tx_power))
}
