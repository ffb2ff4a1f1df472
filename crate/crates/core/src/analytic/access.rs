use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{one_minus_cos, NetworkConfig};
use crate::quadrature::{
    adaptive_rule, adaptive_rule_with_breaks, integrate, integrate_with_breaks, Integral, QuadratureRule, Tolerance,
};
use crate::special::{gen_binom_coeff, ln_gamma};

/// `2π Λ_u R_⊕²`: turns an integral over `sin θ dθ` on the cap into an
/// expected user count.
pub(crate) fn ppp_prefactor(cfg: &NetworkConfig) -> f64 {
    2.0 * PI * cfg.user_density * cfg.earth_radius * cfg.earth_radius
}

/// Squared user–HAP distance at polar angle `theta`.
fn squared_distance(theta: f64, cfg: &NetworkConfig) -> f64 {
    cfg.hap_altitude.powi(2) + 2.0 * cfg.earth_radius * cfg.hap_sphere_radius() * one_minus_cos(theta)
}

/// `1 − (1 + x)^(−m)` without cancellation for small `x`.
fn one_minus_gamma_mgf(x: f64, m: f64) -> f64 {
    -(-m * x.ln_1p()).exp_m1()
}

/// Laplace transform of the aggregate power received at the HAP from all
/// users of the cap, `E[exp(−s I)]`, by adaptive quadrature over the polar
/// angle.
pub fn laplace_interference(s: f64, cfg: &NetworkConfig) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain {
            function: "laplace_interference",
            value: s,
            reason: "requires finite s >= 0",
        });
    }
    let prefactor = ppp_prefactor(cfg);
    if s == 0.0 || prefactor == 0.0 {
        return Ok(1.0);
    }
    let scale = s * cfg.rician_scale * cfg.rf_link_gain();
    let m1 = cfg.rician_shape as f64;
    let half_alpha = 0.5 * cfg.path_loss_exponent;
    let integrand = |theta: f64| {
        let x = scale * squared_distance(theta, cfg).powf(-half_alpha);
        one_minus_gamma_mgf(x, m1) * theta.sin()
    };
    let tol = Tolerance::absolute(1e-10 / prefactor);
    let exponent = prefactor * integrate(integrand, 0.0, cfg.geometry().theta_max, tol)?.value;
    Ok((-exponent).exp())
}

/// Fixed quadrature over the cap for the interference exponent, in the
/// variable `u = 1 − cos θ` (so `sin θ dθ = du` and the squared distance is
/// linear in `u`). Panels are graded so the squared distance grows by at most
/// `√2` across each, which keeps the rule accurate for every `s`.
#[derive(Debug, Clone)]
pub(crate) struct InterferenceField {
    prefactor: f64,
    m1: f64,
    weights: Vec<f64>,
    /// `m₂ K₀ D^(−α/2)` at each node.
    strengths: Vec<f64>,
}

impl InterferenceField {
    pub(crate) fn new(cfg: &NetworkConfig) -> Result<Self> {
        let geom = cfg.geometry();
        let h2 = geom.hap_altitude * geom.hap_altitude;
        let slope = 2.0 * geom.earth_radius * geom.hap_sphere_radius;
        let k0 = cfg.rician_scale * cfg.rf_link_gain();
        let half_alpha = 0.5 * cfg.path_loss_exponent;
        let mut weights = Vec::new();
        let mut strengths = Vec::new();
        for (a, b) in graded_panels(cfg, std::f64::consts::SQRT_2) {
            // A rule adapted to a constant on one panel is the plain
            // 21-point Kronrod rule.
            let rule = adaptive_rule(|_| 1.0, a, b, Tolerance::absolute(f64::INFINITY))?;
            for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                weights.push(w);
                strengths.push(k0 * (h2 + slope * u).powf(-half_alpha));
            }
        }
        Ok(InterferenceField {
            prefactor: ppp_prefactor(cfg),
            m1: cfg.rician_shape as f64,
            weights,
            strengths,
        })
    }

    /// `E[I]`, the slope of the exponent at `s = 0`.
    pub(crate) fn mean_power(&self) -> f64 {
        let integral: f64 = self.weights.iter().zip(&self.strengths).map(|(w, x)| w * x).sum();
        self.prefactor * self.m1 * integral
    }

    /// `−ln E[exp(−s I)]`.
    pub(crate) fn exponent(&self, s: f64) -> f64 {
        if s == 0.0 || self.prefactor == 0.0 {
            return 0.0;
        }
        let integral: f64 = self
            .weights
            .iter()
            .zip(&self.strengths)
            .map(|(w, x)| w * one_minus_gamma_mgf(s * x, self.m1))
            .sum();
        self.prefactor * integral
    }
}

/// The `z`-independent parts of the CCDF of a user's normalized signal
/// `Z = ρ / (σ_H² + I)` for a user at polar angle `polar_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZContext {
    pub polar_angle: f64,
    pub distance: f64,
    /// `(m₁!)^(−1/m₁)`.
    pub beta: f64,
    /// `μ / z = d^α / (m₂ K₀)`.
    pub mu_coefficient: f64,
}

impl ZContext {
    pub fn new(polar_angle: f64, cfg: &NetworkConfig) -> Result<Self> {
        let geom = cfg.geometry();
        if !(0.0..=geom.theta_max).contains(&polar_angle) {
            return Err(Error::Domain {
                function: "ZContext::new",
                value: polar_angle,
                reason: "polar angle outside the served cap",
            });
        }
        let m1 = cfg.rician_shape as f64;
        let distance = geom.user_distance(polar_angle);
        Ok(ZContext {
            polar_angle,
            distance,
            beta: (-ln_gamma(m1 + 1.0)? / m1).exp(),
            mu_coefficient: distance.powf(cfg.path_loss_exponent) / (cfg.rician_scale * cfg.rf_link_gain()),
        })
    }
}

/// Breakpoints on `[0, 1]` graded geometrically around the scale on which
/// the CCDF of `Z` falls off, `1 / (β μ/z (σ_H² + E[I]))`. At high user
/// density that scale is far below any fixed resolution on `[0, 1]`.
fn z_breaks(ctx: &ZContext, cfg: &NetworkConfig, mean_power: f64) -> Vec<f64> {
    let scale = 1.0 / (ctx.beta * ctx.mu_coefficient * (cfg.hap_noise + mean_power));
    let mut breaks = vec![0.0];
    if scale.is_finite() && scale > 0.0 {
        let mut z = scale * 2f64.powi(-12);
        while z < 1.0 {
            breaks.push(z);
            z *= 2.0;
        }
    }
    breaks.push(1.0);
    breaks
}

/// Alternating binomial sum of the CCDF given the interference exponent as
/// a function of `s`. Returns the unclamped value.
fn ccdf_sum(z: f64, ctx: &ZContext, cfg: &NetworkConfig, mut exponent: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    if z <= 0.0 {
        return Ok(1.0);
    }
    let m1 = cfg.rician_shape;
    let mu = z * ctx.mu_coefficient;
    let mut sum = 0.0;
    for k in 1..=m1 {
        let s = k as f64 * ctx.beta * mu;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * gen_binom_coeff(m1 as f64, k as u64) * (-s * cfg.hap_noise - exponent(s)?).exp();
    }
    Ok(sum)
}

/// `P(Z > z)`, clamped to `[0, 1]`.
pub fn ccdf_z(z: f64, ctx: &ZContext, cfg: &NetworkConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain {
            function: "ccdf_z",
            value: z,
            reason: "requires 0 <= z <= 1",
        });
    }
    let raw = ccdf_sum(z, ctx, cfg, |s| Ok(-laplace_interference(s, cfg)?.ln()))?;
    Ok(raw.clamp(0.0, 1.0))
}

/// `E[exp(c Z)] = 1 + c ∫₀¹ e^(cz) P(Z > z) dz`.
pub fn mgf_z(c: f64, ctx: &ZContext, cfg: &NetworkConfig) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::Domain {
            function: "mgf_z",
            value: c,
            reason: "requires finite c",
        });
    }
    if c == 0.0 {
        return Ok(1.0);
    }
    let field = InterferenceField::new(cfg)?;
    let mut failure = None;
    let breaks = z_breaks(ctx, cfg, field.mean_power());
    let integral = integrate_with_breaks(
        |z| {
            let f = ccdf_sum(z, ctx, cfg, |s| Ok(field.exponent(s))).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            });
            (c * z).exp() * f.clamp(0.0, 1.0)
        },
        &breaks,
        Tolerance::absolute(1e-10 / c.abs().max(1.0)),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(1.0 + c * integral.value)
}

/// The CCDF of `Z` at one polar angle, tabulated on a rule adapted to it.
#[derive(Debug, Clone)]
pub(crate) struct ZProfile {
    pub(crate) rule: QuadratureRule,
    /// Clamped CCDF at `rule.nodes`.
    pub(crate) ccdf: Vec<f64>,
    pub(crate) clamped: usize,
}

impl ZProfile {
    fn new(theta: f64, cfg: &NetworkConfig, field: &InterferenceField) -> Result<Self> {
        let ctx = ZContext::new(theta, cfg)?;
        let eval = |z: f64| {
            ccdf_sum(z, &ctx, cfg, |s| Ok(field.exponent(s)))
                .expect("field exponent is infallible")
        };
        let tol = Tolerance::relative(1e-10).with_abs(1e-16);
        let breaks = z_breaks(&ctx, cfg, field.mean_power());
        let rule = adaptive_rule_with_breaks(|z| eval(z).clamp(0.0, 1.0), &breaks, tol)?;
        let mut clamped = 0;
        let ccdf = rule
            .nodes
            .iter()
            .map(|&z| {
                let raw = eval(z);
                if !(0.0..=1.0).contains(&raw) {
                    clamped += 1;
                }
                raw.clamp(0.0, 1.0)
            })
            .collect();
        Ok(ZProfile { rule, ccdf, clamped })
    }

    /// `∫₀¹ P(Z > z) dz = E[Z]`.
    pub(crate) fn mean(&self) -> f64 {
        self.rule.apply_values(&self.ccdf)
    }
}

/// Splits `[0, 1 − cos θ_max]` into panels over which the squared user
/// distance grows by at most `ratio`. Functions of `1/D` are then smooth on
/// every panel even though `D` is small near the sub-HAP point.
fn graded_panels(cfg: &NetworkConfig, ratio: f64) -> Vec<(f64, f64)> {
    let geom = cfg.geometry();
    let h2 = geom.hap_altitude * geom.hap_altitude;
    let slope = 2.0 * geom.earth_radius * geom.hap_sphere_radius;
    let u_max = geom.one_minus_cos_theta_max();
    let d2_max = geom.d_max * geom.d_max;
    let mut edges = vec![0.0];
    if h2 > 0.0 && d2_max > h2 {
        let panels = ((d2_max / h2).ln() / ratio.ln()).ceil().max(1.0) as usize;
        let step = (d2_max / h2).powf(1.0 / panels as f64);
        for k in 1..panels {
            edges.push(((h2 * step.powi(k as i32) - h2) / slope).min(u_max));
        }
    }
    edges.push(u_max);
    edges.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}

/// The access-side quantities shared by the AADR and BREP: a rule over the
/// cap in `u = 1 − cos θ` (so the area element `sin θ dθ` is `du`) and a
/// CCDF profile of `Z` at each of its nodes.
#[derive(Debug, Clone)]
pub struct AccessAnalysis {
    pub(crate) prefactor: f64,
    pub(crate) cap_rule: QuadratureRule,
    pub(crate) profiles: Vec<ZProfile>,
}

impl AccessAnalysis {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        let prefactor = ppp_prefactor(cfg);
        let empty = QuadratureRule {
            nodes: Vec::new(),
            weights: Vec::new(),
            integral: Integral {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
            },
        };
        let panels = graded_panels(cfg, 4.0);
        if prefactor == 0.0 || panels.is_empty() {
            return Ok(AccessAnalysis {
                prefactor: 0.0,
                cap_rule: empty,
                profiles: Vec::new(),
            });
        }
        let field = InterferenceField::new(cfg)?;
        let theta_of = |u: f64| 2.0 * (0.5 * u).sqrt().asin();
        let build = |u: f64| ZProfile::new(theta_of(u).min(cfg.geometry().theta_max), cfg, &field);

        // The first pass of every panel is known in advance; build it in
        // parallel.
        let mut first = Vec::new();
        for &(a, b) in &panels {
            first.extend(adaptive_rule(|_| 1.0, a, b, Tolerance::absolute(f64::INFINITY))?.nodes);
        }
        let built: Vec<(u64, ZProfile)> = first
            .par_iter()
            .map(|&u| build(u).map(|p| (u.to_bits(), p)))
            .collect::<Result<_>>()?;
        let mut cache: HashMap<u64, ZProfile> = built.into_iter().collect();

        let mut rule = empty;
        let mut failure = None;
        for &(a, b) in &panels {
            let panel = adaptive_rule(
                |u| {
                    if let Entry::Vacant(slot) = cache.entry(u.to_bits()) {
                        match build(u) {
                            Ok(p) => {
                                slot.insert(p);
                            }
                            Err(e) => {
                                failure.get_or_insert(e);
                                return f64::NAN;
                            }
                        }
                    }
                    cache[&u.to_bits()].mean()
                },
                a,
                b,
                Tolerance::relative(1e-8),
            );
            if let Some(e) = failure.take() {
                return Err(e);
            }
            let panel = panel?;
            rule.nodes.extend(panel.nodes);
            rule.weights.extend(panel.weights);
            rule.integral.value += panel.integral.value;
            rule.integral.abs_error += panel.integral.abs_error;
            rule.integral.evaluations += panel.integral.evaluations;
        }
        let profiles = rule
            .nodes
            .iter()
            .map(|u| match cache.remove(&u.to_bits()) {
                Some(p) => Ok(p),
                None => build(*u),
            })
            .collect::<Result<_>>()?;
        Ok(AccessAnalysis {
            prefactor,
            cap_rule: rule,
            profiles,
        })
    }

    /// Average access data rate for the given RF bandwidth, bit/s.
    pub fn aadr(&self, rf_bandwidth: f64) -> f64 {
        if self.profiles.is_empty() {
            return 0.0;
        }
        let means: Vec<f64> = self.profiles.iter().map(ZProfile::mean).collect();
        self.prefactor * rf_bandwidth / std::f64::consts::LN_2 * self.cap_rule.apply_values(&means)
    }

    /// Error estimate of the outer quadrature, in the same units as
    /// [`AccessAnalysis::aadr`] divided by the bandwidth.
    pub fn outer_error(&self, rf_bandwidth: f64) -> f64 {
        self.prefactor * rf_bandwidth / std::f64::consts::LN_2 * self.cap_rule.integral.abs_error
    }

    pub fn cap_nodes(&self) -> usize {
        self.cap_rule.len()
    }

    pub fn z_nodes(&self) -> usize {
        self.profiles.iter().map(|p| p.rule.len()).sum()
    }

    pub fn clamped_ccdf_values(&self) -> usize {
        self.profiles.iter().map(|p| p.clamped).sum()
    }

    /// Expected number of users in the cap.
    pub fn mean_user_count(&self) -> f64 {
        if self.profiles.is_empty() {
            return 0.0;
        }
        self.prefactor * self.cap_rule.weights.iter().sum::<f64>()
    }
}

/// Average access data rate, bit/s.
pub fn aadr(cfg: &NetworkConfig) -> Result<f64> {
    Ok(AccessAnalysis::new(cfg)?.aadr(cfg.rf_bandwidth))
}
