//! Monte Carlo estimation of the three metrics from independently seeded
//! network realizations.

mod trace;

pub use trace::{export_trace, load_trace, write_summary_json};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::fso_snr_gain;
use crate::error::{Error, Result};
use crate::model::{DerivedGeometry, NetworkConfig};
use crate::stochastic::{
    sample_nearest_satellite, sample_users, FsoDeficit, SatelliteRealization, SatelliteSampling, UserRealization,
};

/// Fewest rounds [`estimate_metrics`] accepts.
pub const MIN_ROUNDS: usize = 100;

/// 97.5% standard normal quantile.
const Z_975: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub rounds: usize,
    pub seed: u64,
    pub satellite_sampling: SatelliteSampling,
    pub deficit: FsoDeficit,
    /// Run rounds on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            rounds: 10_000,
            seed: 0x5A61_2024,
            satellite_sampling: SatelliteSampling::ContactAngle,
            deficit: FsoDeficit::AtCap,
            parallel: true,
        }
    }
}

/// The random stream of round `round` under master seed `seed`. Streams
/// of distinct rounds are independent and do not depend on evaluation
/// order.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// A complete realization: every user and the nearest satellite.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundInputs {
    pub users: Vec<UserRealization>,
    pub satellite: SatelliteRealization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub round_index: u64,
    pub user_count: u64,
    /// Aggregate received RF power at the HAP, W.
    #[serde(rename = "interference_W")]
    pub interference: f64,
    /// `B_RF Σ log₂(1 + γ_i)`, bit/s.
    #[serde(rename = "access_rate_bps_exact")]
    pub access_rate_exact: f64,
    /// `(B_RF / ln 2) Σ γ_i`, bit/s.
    #[serde(rename = "access_rate_bps_linear")]
    pub access_rate_linear: f64,
    #[serde(rename = "backhaul_rate_bps")]
    pub backhaul_rate: f64,
    pub blocked: bool,
    /// Backhaul rate strictly above the exact access sum rate.
    pub exceeded: bool,
}

/// Received RF power of one user at the HAP.
pub fn user_received_power(user: &UserRealization, cfg: &NetworkConfig) -> f64 {
    cfg.rf_link_gain() * user.rf_fade_power * user.distance.powf(-cfg.path_loss_exponent)
}

/// Computes the rates of a fixed realization.
pub fn evaluate_round(round_index: u64, inputs: &RoundInputs, cfg: &NetworkConfig) -> RoundOutcome {
    let powers: Vec<f64> = inputs.users.iter().map(|u| user_received_power(u, cfg)).collect();
    let interference: f64 = powers.iter().sum();
    let mut sum_log = 0.0;
    let mut sum_linear = 0.0;
    for &rho in &powers {
        let sinr = rho / (cfg.hap_noise + (interference - rho).max(0.0));
        // ln(1 + x) ≤ x term by term, so the sums keep that order.
        sum_log += sinr.ln_1p();
        sum_linear += sinr;
    }
    let scale = cfg.rf_bandwidth / std::f64::consts::LN_2;
    let access_rate_exact = scale * sum_log;
    let access_rate_linear = scale * sum_linear;

    let sat = &inputs.satellite;
    let blocked = !sat.visible;
    let backhaul_rate = if blocked {
        0.0
    } else {
        let snr = fso_snr_gain(cfg) * (sat.fso_fade / sat.distance).powi(2);
        cfg.fso_bandwidth / std::f64::consts::LN_2 * snr.ln_1p()
    };
    RoundOutcome {
        round_index,
        user_count: inputs.users.len() as u64,
        interference,
        access_rate_exact,
        access_rate_linear,
        backhaul_rate,
        blocked,
        exceeded: backhaul_rate > access_rate_exact,
    }
}

pub fn sample_round<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    geom: &DerivedGeometry,
    opts: &SimulationOptions,
) -> RoundInputs {
    let users = sample_users(rng, cfg, geom);
    let satellite = sample_nearest_satellite(rng, cfg, opts.satellite_sampling, opts.deficit);
    RoundInputs { users, satellite }
}

/// Draws and evaluates round `round_index` on its own stream.
pub fn run_round(round_index: u64, cfg: &NetworkConfig, geom: &DerivedGeometry, opts: &SimulationOptions) -> RoundOutcome {
    let mut rng = round_rng(opts.seed, round_index);
    let inputs = sample_round(&mut rng, cfg, geom, opts);
    evaluate_round(round_index, &inputs, cfg)
}

/// Runs `opts.rounds` rounds, returned in round order.
pub fn simulate(cfg: &NetworkConfig, opts: &SimulationOptions) -> Result<Vec<RoundOutcome>> {
    cfg.validate()?;
    let geom = cfg.geometry();
    let n = opts.rounds as u64;
    Ok(if opts.parallel {
        (0..n).into_par_iter().map(|k| run_round(k, cfg, &geom, opts)).collect()
    } else {
        (0..n).map(|k| run_round(k, cfg, &geom, opts)).collect()
    })
}

/// Sample mean with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    /// Summation runs in slice order, so equal inputs give bit-identical
    /// estimates.
    pub fn from_samples(samples: impl Iterator<Item = f64> + Clone) -> Estimate {
        let n = samples.clone().count();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                half_width: f64::NAN,
            };
        }
        let mean = samples.clone().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate {
                mean,
                half_width: f64::INFINITY,
            };
        }
        let var = samples.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Estimate {
            mean,
            half_width: Z_975 * (var / n as f64).sqrt(),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.half_width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsEstimate {
    /// bit/s, exact log rates.
    pub aadr_exact: Estimate,
    /// bit/s, linearized rates `ln(1 + γ) ≈ γ`.
    pub aadr_linear: Estimate,
    /// bit/s
    pub abdr: Estimate,
    /// Fraction of rounds with the backhaul rate above the access sum rate.
    pub brep: Estimate,
    pub blockage_frequency: f64,
    pub mean_user_count: f64,
    pub rounds: usize,
    pub seed: u64,
    pub config_hash: String,
}

/// Averages round outcomes.
pub fn summarize(outcomes: &[RoundOutcome], seed: u64, config_hash: String) -> MetricsEstimate {
    let n = outcomes.len() as f64;
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    MetricsEstimate {
        aadr_exact: Estimate::from_samples(outcomes.iter().map(|o| o.access_rate_exact)),
        aadr_linear: Estimate::from_samples(outcomes.iter().map(|o| o.access_rate_linear)),
        abdr: Estimate::from_samples(outcomes.iter().map(|o| o.backhaul_rate)),
        brep: Estimate::from_samples(outcomes.iter().map(|o| indicator(o.exceeded))),
        blockage_frequency: outcomes.iter().map(|o| indicator(o.blocked)).sum::<f64>() / n,
        mean_user_count: outcomes.iter().map(|o| o.user_count as f64).sum::<f64>() / n,
        rounds: outcomes.len(),
        seed,
        config_hash,
    }
}

pub fn estimate_metrics(cfg: &NetworkConfig, opts: &SimulationOptions) -> Result<MetricsEstimate> {
    if opts.rounds < MIN_ROUNDS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_ROUNDS} rounds are required, got {}",
            opts.rounds
        )));
    }
    let outcomes = simulate(cfg, opts)?;
    Ok(summarize(&outcomes, opts.seed, cfg.config_hash()))
}

/// One realization of the aggregate received power of the user PPP.
pub fn sample_interference<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig, geom: &DerivedGeometry) -> f64 {
    sample_users(rng, cfg, geom).iter().map(|u| user_received_power(u, cfg)).sum()
}

/// One draw of `Z = ρ / (σ_H² + I)` for a user at polar angle `theta`, with
/// `I` from an independent PPP realization.
pub fn sample_z<R: Rng + ?Sized>(rng: &mut R, theta: f64, cfg: &NetworkConfig, geom: &DerivedGeometry) -> f64 {
    let fade = Gamma::new(cfg.rician_shape as f64, cfg.rician_scale)
        .expect("validated config")
        .sample(rng);
    let rho = cfg.rf_link_gain() * fade * geom.user_distance(theta).powf(-cfg.path_loss_exponent);
    rho / (cfg.hap_noise + sample_interference(rng, cfg, geom))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> NetworkConfig {
        NetworkConfig::default().with_user_density(1e-8)
    }

    fn pinned_satellite(cfg: &NetworkConfig, visible: bool) -> SatelliteRealization {
        SatelliteRealization {
            contact_angle: 0.0,
            distance: cfg.sat_shell_radius - cfg.hap_sphere_radius(),
            visible,
            fso_fade: cfg.pointing_cap,
            deviation_angle: 0.0,
        }
    }

    #[test]
    fn no_users_means_exceeded_when_visible() {
        let cfg = desk();
        let inputs = RoundInputs {
            users: Vec::new(),
            satellite: pinned_satellite(&cfg, true),
        };
        let o = evaluate_round(0, &inputs, &cfg);
        assert_eq!(o.access_rate_exact, 0.0);
        assert!(o.backhaul_rate > 0.0 && o.exceeded && !o.blocked);
    }

    #[test]
    fn blocked_round_never_exceeds() {
        let cfg = desk();
        let user = UserRealization {
            polar_angle: 0.0,
            azimuth: 0.0,
            distance: cfg.hap_altitude,
            rf_fade_power: 1.0,
        };
        let o = evaluate_round(
            0,
            &RoundInputs {
                users: vec![user],
                satellite: pinned_satellite(&cfg, false),
            },
            &cfg,
        );
        assert_eq!(o.backhaul_rate, 0.0);
        assert!(o.blocked && !o.exceeded);
    }

    #[test]
    fn linearized_rate_dominates_exact_rate() {
        let cfg = desk();
        let opts = SimulationOptions {
            rounds: 200,
            ..SimulationOptions::default()
        };
        for o in simulate(&cfg, &opts).unwrap() {
            assert!(o.access_rate_linear - o.access_rate_exact >= 0.0);
        }
    }

    #[test]
    fn rounds_are_order_independent() {
        let cfg = desk();
        let geom = cfg.geometry();
        let opts = SimulationOptions::default();
        let forward: Vec<_> = (0..20).map(|k| run_round(k, &cfg, &geom, &opts)).collect();
        for k in (0..20).rev() {
            assert_eq!(run_round(k, &cfg, &geom, &opts), forward[k as usize]);
        }
    }

    #[test]
    fn too_few_rounds_rejected() {
        let opts = SimulationOptions {
            rounds: 99,
            ..SimulationOptions::default()
        };
        assert!(matches!(estimate_metrics(&desk(), &opts), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn estimate_of_constant_has_zero_width() {
        let e = Estimate::from_samples([2.0, 2.0, 2.0].into_iter());
        assert_eq!((e.mean, e.half_width), (2.0, 0.0));
    }
}
