use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::geometry::{derive_geometry, DerivedGeometry};
use super::units::{db_to_linear, dbw_to_watts, linear_to_db, watts_to_dbw, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Physical and network parameters of the user → HAP → satellite uplink.
///
/// Every field is in SI units (meters, watts, hertz, radians) and every gain
/// is linear. [`NetworkConfig::default`] is the reference parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub earth_radius: f64,
    pub sat_shell_radius: f64,
    pub hap_altitude: f64,
    /// Geodesic radius of the HAP's ground footprint.
    pub hap_coverage_radius: f64,
    /// Ground users per square meter.
    pub user_density: f64,
    pub sat_count: u32,
    pub user_tx_power: f64,
    pub user_gain: f64,
    pub hap_rx_gain: f64,
    pub hap_tx_power: f64,
    pub hap_tx_gain: f64,
    pub sat_gain: f64,
    pub rf_frequency: f64,
    pub fso_wavelength: f64,
    pub path_loss_exponent: f64,
    /// Shape `m₁` of the Gamma approximation to squared shadowed-Rician fading.
    pub rician_shape: u32,
    /// Scale `m₂` of the same Gamma law.
    pub rician_scale: f64,
    /// Pointing-error shape `η_s`.
    pub pointing_shape: f64,
    /// Pointing-error cap `A₀`; the FSO fading coefficient lives on `[0, A₀]`.
    pub pointing_cap: f64,
    /// Rayleigh scale `σ₀` of the beam deviation angle, radians.
    pub deviation_std: f64,
    /// Optical-to-electrical conversion coefficient `υ`.
    pub oe_coeff: f64,
    pub hap_noise: f64,
    pub sat_noise: f64,
    pub rf_bandwidth: f64,
    pub fso_bandwidth: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            earth_radius: 6_371e3,
            sat_shell_radius: 6_871e3,
            hap_altitude: 20e3,
            hap_coverage_radius: 80e3,
            user_density: 1e-5,
            sat_count: 300,
            user_tx_power: 20.0,
            user_gain: db_to_linear(8.0),
            hap_rx_gain: db_to_linear(32.0),
            hap_tx_power: dbw_to_watts(20.0),
            hap_tx_gain: db_to_linear(52.0),
            sat_gain: db_to_linear(42.0),
            rf_frequency: 2e9,
            fso_wavelength: 1550e-9,
            path_loss_exponent: 2.0,
            rician_shape: 2,
            rician_scale: 0.5,
            pointing_shape: 1.00526,
            pointing_cap: 0.01979,
            deviation_std: 15e-3,
            oe_coeff: 0.5,
            hap_noise: 2e-14,
            sat_noise: 1.5e-12,
            rf_bandwidth: 1e9,
            fso_bandwidth: 100e9,
        }
    }
}

impl NetworkConfig {
    pub fn rf_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.rf_frequency
    }

    pub fn hap_sphere_radius(&self) -> f64 {
        self.earth_radius + self.hap_altitude
    }

    pub fn sat_altitude(&self) -> f64 {
        self.sat_shell_radius - self.earth_radius
    }

    pub fn geometry(&self) -> DerivedGeometry {
        derive_geometry(self)
    }

    /// Product `P_u G_u G_H^r (λ_RF / 4π)²`: received RF power per unit
    /// fading power at unit distance.
    pub fn rf_link_gain(&self) -> f64 {
        let k = self.rf_wavelength() / (4.0 * std::f64::consts::PI);
        self.user_tx_power * self.user_gain * self.hap_rx_gain * k * k
    }

    pub fn with_sat_altitude(mut self, altitude: f64) -> Self {
        self.sat_shell_radius = self.earth_radius + altitude;
        self
    }

    pub fn with_hap_tx_power(mut self, watts: f64) -> Self {
        self.hap_tx_power = watts;
        self
    }

    pub fn with_sat_count(mut self, count: u32) -> Self {
        self.sat_count = count;
        self
    }

    pub fn with_user_density(mut self, density: f64) -> Self {
        self.user_density = density;
        self
    }

    /// Checks every invariant, naming the offending config key on failure.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("earth_radius_km", self.earth_radius),
            ("sat_shell_radius_km", self.sat_shell_radius),
            ("hap_altitude_km", self.hap_altitude),
            ("user_tx_power_w", self.user_tx_power),
            ("user_gain_dbi", self.user_gain),
            ("hap_rx_gain_dbi", self.hap_rx_gain),
            ("hap_tx_gain_dbi", self.hap_tx_gain),
            ("sat_gain_dbi", self.sat_gain),
            ("rf_frequency_ghz", self.rf_frequency),
            ("fso_wavelength_nm", self.fso_wavelength),
            ("path_loss_exponent", self.path_loss_exponent),
            ("rician_scale", self.rician_scale),
            ("pointing_shape", self.pointing_shape),
            ("pointing_cap", self.pointing_cap),
            ("deviation_std_mrad", self.deviation_std),
            ("oe_coeff", self.oe_coeff),
            ("hap_noise_w", self.hap_noise),
            ("sat_noise_w", self.sat_noise),
            ("rf_bandwidth_ghz", self.rf_bandwidth),
            ("fso_bandwidth_ghz", self.fso_bandwidth),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(key, format!("must be finite and > 0, got {value}")));
            }
        }
        let non_negative = [
            ("hap_coverage_radius_km", self.hap_coverage_radius),
            ("user_density_per_m2", self.user_density),
            ("hap_tx_power_dbw", self.hap_tx_power),
        ];
        for (key, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::config(key, format!("must be finite and >= 0, got {value}")));
            }
        }
        if self.sat_count == 0 {
            return Err(Error::config("sat_count", "must be at least 1"));
        }
        if self.rician_shape == 0 {
            return Err(Error::config("rician_shape", "must be an integer >= 1"));
        }
        if self.sat_shell_radius <= self.hap_sphere_radius() {
            return Err(Error::config(
                "sat_shell_radius_km",
                format!(
                    "satellite shell radius {} m must exceed earth radius + HAP altitude {} m",
                    self.sat_shell_radius,
                    self.hap_sphere_radius()
                ),
            ));
        }
        if self.hap_coverage_radius >= std::f64::consts::PI * self.earth_radius {
            return Err(Error::config(
                "hap_coverage_radius_km",
                "coverage cap must be smaller than a hemisphere's half-circumference",
            ));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON serialization, hex encoded.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Renders the config as a complete key/value document that
    /// [`load_config`] reads back.
    pub fn to_document(&self) -> String {
        let doc = ConfigDocument::from(self);
        toml::to_string(&doc).expect("config document serializes")
    }
}

/// On-disk representation: flat keys with the unit in the name. Every key
/// is optional and falls back to the reference value.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    earth_radius_km: Option<f64>,
    sat_shell_radius_km: Option<f64>,
    /// Alternative to `sat_shell_radius_km`, measured above the earth radius.
    sat_altitude_km: Option<f64>,
    hap_altitude_km: Option<f64>,
    hap_coverage_radius_km: Option<f64>,
    user_density_per_m2: Option<f64>,
    sat_count: Option<i64>,
    user_tx_power_w: Option<f64>,
    user_gain_dbi: Option<f64>,
    hap_rx_gain_dbi: Option<f64>,
    hap_tx_power_dbw: Option<f64>,
    hap_tx_gain_dbi: Option<f64>,
    sat_gain_dbi: Option<f64>,
    rf_frequency_ghz: Option<f64>,
    fso_wavelength_nm: Option<f64>,
    path_loss_exponent: Option<f64>,
    rician_shape: Option<i64>,
    rician_scale: Option<f64>,
    pointing_shape: Option<f64>,
    pointing_cap: Option<f64>,
    deviation_std_mrad: Option<f64>,
    oe_coeff: Option<f64>,
    hap_noise_w: Option<f64>,
    sat_noise_w: Option<f64>,
    rf_bandwidth_ghz: Option<f64>,
    fso_bandwidth_ghz: Option<f64>,
}

impl From<&NetworkConfig> for ConfigDocument {
    fn from(c: &NetworkConfig) -> Self {
        ConfigDocument {
            earth_radius_km: Some(c.earth_radius / 1e3),
            sat_shell_radius_km: Some(c.sat_shell_radius / 1e3),
            sat_altitude_km: None,
            hap_altitude_km: Some(c.hap_altitude / 1e3),
            hap_coverage_radius_km: Some(c.hap_coverage_radius / 1e3),
            user_density_per_m2: Some(c.user_density),
            sat_count: Some(c.sat_count.into()),
            user_tx_power_w: Some(c.user_tx_power),
            user_gain_dbi: Some(linear_to_db(c.user_gain)),
            hap_rx_gain_dbi: Some(linear_to_db(c.hap_rx_gain)),
            hap_tx_power_dbw: Some(watts_to_dbw(c.hap_tx_power)),
            hap_tx_gain_dbi: Some(linear_to_db(c.hap_tx_gain)),
            sat_gain_dbi: Some(linear_to_db(c.sat_gain)),
            rf_frequency_ghz: Some(c.rf_frequency / 1e9),
            fso_wavelength_nm: Some(c.fso_wavelength / 1e-9),
            path_loss_exponent: Some(c.path_loss_exponent),
            rician_shape: Some(c.rician_shape.into()),
            rician_scale: Some(c.rician_scale),
            pointing_shape: Some(c.pointing_shape),
            pointing_cap: Some(c.pointing_cap),
            deviation_std_mrad: Some(c.deviation_std / 1e-3),
            oe_coeff: Some(c.oe_coeff),
            hap_noise_w: Some(c.hap_noise),
            sat_noise_w: Some(c.sat_noise),
            rf_bandwidth_ghz: Some(c.rf_bandwidth / 1e9),
            fso_bandwidth_ghz: Some(c.fso_bandwidth / 1e9),
        }
    }
}

fn positive_count(key: &str, value: i64) -> Result<u32> {
    u32::try_from(value)
        .ok()
        .filter(|&v| v >= 1)
        .ok_or_else(|| Error::config(key, format!("must be a positive integer, got {value}")))
}

impl TryFrom<ConfigDocument> for NetworkConfig {
    type Error = Error;

    fn try_from(doc: ConfigDocument) -> Result<Self> {
        let mut c = NetworkConfig::default();
        if let Some(v) = doc.earth_radius_km {
            c.earth_radius = v * 1e3;
        }
        match (doc.sat_shell_radius_km, doc.sat_altitude_km) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "sat_altitude_km",
                    "give either sat_shell_radius_km or sat_altitude_km, not both",
                ))
            }
            (Some(r), None) => c.sat_shell_radius = r * 1e3,
            (None, Some(h)) => c.sat_shell_radius = c.earth_radius + h * 1e3,
            (None, None) => {}
        }
        if let Some(v) = doc.hap_altitude_km {
            c.hap_altitude = v * 1e3;
        }
        if let Some(v) = doc.hap_coverage_radius_km {
            c.hap_coverage_radius = v * 1e3;
        }
        if let Some(v) = doc.user_density_per_m2 {
            c.user_density = v;
        }
        if let Some(v) = doc.sat_count {
            c.sat_count = positive_count("sat_count", v)?;
        }
        if let Some(v) = doc.user_tx_power_w {
            c.user_tx_power = v;
        }
        if let Some(v) = doc.user_gain_dbi {
            c.user_gain = db_to_linear(v);
        }
        if let Some(v) = doc.hap_rx_gain_dbi {
            c.hap_rx_gain = db_to_linear(v);
        }
        if let Some(v) = doc.hap_tx_power_dbw {
            c.hap_tx_power = dbw_to_watts(v);
        }
        if let Some(v) = doc.hap_tx_gain_dbi {
            c.hap_tx_gain = db_to_linear(v);
        }
        if let Some(v) = doc.sat_gain_dbi {
            c.sat_gain = db_to_linear(v);
        }
        if let Some(v) = doc.rf_frequency_ghz {
            c.rf_frequency = v * 1e9;
        }
        if let Some(v) = doc.fso_wavelength_nm {
            c.fso_wavelength = v * 1e-9;
        }
        if let Some(v) = doc.path_loss_exponent {
            c.path_loss_exponent = v;
        }
        if let Some(v) = doc.rician_shape {
            c.rician_shape = positive_count("rician_shape", v)?;
        }
        if let Some(v) = doc.rician_scale {
            c.rician_scale = v;
        }
        if let Some(v) = doc.pointing_shape {
            c.pointing_shape = v;
        }
        if let Some(v) = doc.pointing_cap {
            c.pointing_cap = v;
        }
        if let Some(v) = doc.deviation_std_mrad {
            c.deviation_std = v * 1e-3;
        }
        if let Some(v) = doc.oe_coeff {
            c.oe_coeff = v;
        }
        if let Some(v) = doc.hap_noise_w {
            c.hap_noise = v;
        }
        if let Some(v) = doc.sat_noise_w {
            c.sat_noise = v;
        }
        if let Some(v) = doc.rf_bandwidth_ghz {
            c.rf_bandwidth = v * 1e9;
        }
        if let Some(v) = doc.fso_bandwidth_ghz {
            c.fso_bandwidth = v * 1e9;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Parses a flat key/value (TOML) document. Absent keys take their
/// reference values; unknown keys are rejected.
pub fn load_config(source: &str) -> Result<NetworkConfig> {
    let doc: ConfigDocument =
        toml::from_str(source).map_err(|e| Error::ConfigParse(e.to_string()))?;
    NetworkConfig::try_from(doc)
}

pub fn load_config_file(path: impl AsRef<Path>) -> Result<NetworkConfig> {
    let text = std::fs::read_to_string(path)?;
    load_config(&text)
}
