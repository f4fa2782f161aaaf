//! Run configuration: a flat TOML table. Every key is optional and unknown
//! keys are rejected.
//!
//! | key | unit | default |
//! |-----|------|---------|
//! | `lambda` | sites per m² | 1e-4 |
//! | `r_min` | m | 2 |
//! | `r_b` | m | 1000 |
//! | `r_inf` | m | 100000 |
//! | `tx_power_dbm` | dBm | 32 |
//! | `floors` | count | 3 |
//! | `noise_figure_db` | dB | 7 |
//! | `bandwidth_hz` | Hz | 3.84e6 |
//! | `sigma_db` | dB | 8 |
//! | `temperature_k` | K | 290 |
//! | `beta` | path-loss exponent | 3 |
//! | `residence_time_s` | s | 0.5 |
//! | `per_cell_scan_s` | s | 0.025 |
//! | `mode` | `compressed` or `parallel` | compressed |
//! | `delta_g` | growth threshold | unset |
//! | `n_max` | scan sizes 1..=n_max | 250 |
//! | `reps` | Monte Carlo replications | 100000 |
//! | `seed` | u64 | unset (generated and printed) |

use std::path::Path;

use anyhow::bail;
use maxsinr_core::interference::NetworkField;
use maxsinr_core::propagation::{
    derive_propagation_params, sigma_x_from_db, PropagationParams, RadioConfig, RingGeometry, SignalStrength,
};
use maxsinr_core::scan::{ScanMode, ScanTiming};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub lambda: f64,
    pub r_min: f64,
    pub r_b: f64,
    pub r_inf: f64,
    pub tx_power_dbm: f64,
    pub floors: u32,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub sigma_db: f64,
    pub temperature_k: f64,
    pub beta: f64,
    pub residence_time_s: f64,
    pub per_cell_scan_s: f64,
    pub mode: ScanMode,
    pub delta_g: Option<f64>,
    pub n_max: usize,
    pub reps: u64,
    pub seed: Option<u64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            r_min: 2.0,
            r_b: 1000.0,
            r_inf: 1e5,
            tx_power_dbm: 32.0,
            floors: 3,
            noise_figure_db: 7.0,
            bandwidth_hz: 3.84e6,
            sigma_db: 8.0,
            temperature_k: 290.0,
            beta: 3.0,
            residence_time_s: 0.5,
            per_cell_scan_s: 0.025,
            mode: ScanMode::Compressed,
            delta_g: None,
            n_max: 250,
            reps: 100_000,
            seed: None,
        }
    }
}

/// Configuration problems; all map to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl Config {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError(format!("reading {}: {e}", p.display())))?;
                Self::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?
            }
        };
        cfg.check().map_err(|e| ConfigError(e.to_string()))?;
        Ok(cfg)
    }

    /// Parse TOML text; errors carry the offending line and column.
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn check(&self) -> anyhow::Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("r_min", self.r_min),
            ("bandwidth_hz", self.bandwidth_hz),
            ("sigma_db", self.sigma_db),
            ("temperature_k", self.temperature_k),
            ("residence_time_s", self.residence_time_s),
            ("per_cell_scan_s", self.per_cell_scan_s),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                bail!("{key} = {v} must be positive and finite");
            }
        }
        if self.r_min >= self.r_b {
            bail!("r_min = {} must be below r_b = {}", self.r_min, self.r_b);
        }
        if self.r_inf < self.r_b {
            bail!("r_inf = {} must not be below r_b = {}", self.r_inf, self.r_b);
        }
        if !(self.beta > 2.0) {
            bail!("beta = {} must exceed 2: the interference law needs alpha = 2/beta < 1", self.beta);
        }
        if self.beta > 4.0 {
            bail!("beta = {} must not exceed 4", self.beta);
        }
        if self.n_max == 0 || self.reps < 2 {
            bail!("n_max must be at least 1 and reps at least 2");
        }
        if let Some(dg) = self.delta_g {
            if !(dg >= 0.0) {
                bail!("delta_g = {dg} must be nonnegative");
            }
        }
        Ok(())
    }

    pub fn radio(&self) -> RadioConfig {
        RadioConfig {
            tx_power_dbm: self.tx_power_dbm,
            floors: self.floors,
            noise_figure_db: self.noise_figure_db,
            bandwidth_hz: self.bandwidth_hz,
            sigma_db: self.sigma_db,
            temperature_k: self.temperature_k,
        }
    }

    pub fn params(&self) -> maxsinr_core::Result<PropagationParams> {
        let p = derive_propagation_params(&self.radio())?;
        PropagationParams::new(p.a_norm, self.beta, sigma_x_from_db(self.sigma_db))
    }

    pub fn geometry(&self) -> maxsinr_core::Result<RingGeometry> {
        RingGeometry::new(self.r_min, self.r_b)
    }

    pub fn field(&self) -> maxsinr_core::Result<NetworkField> {
        NetworkField::new(self.lambda, self.r_min, self.r_inf, self.params()?)
    }

    pub fn signal(&self) -> maxsinr_core::Result<SignalStrength> {
        Ok(SignalStrength::new(self.params()?, self.geometry()?))
    }

    pub fn timing(&self) -> maxsinr_core::Result<ScanTiming> {
        ScanTiming::new(self.residence_time_s, self.per_cell_scan_s, self.mode)
    }

    /// SHA-256 of the configuration serialized with sorted keys.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let sorted: std::collections::BTreeMap<String, serde_json::Value> = match value {
            serde_json::Value::Object(map) => map.into_iter().collect(),
            _ => unreachable!("config is a table"),
        };
        let text = serde_json::to_string(&sorted).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_setup() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let err = Config::parse("lambda = 1e-4\nsigma_bd = 8.0\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("sigma_bd"), "{err}");
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = Config::parse("r_b = 900.0\nlambda = 2e-4\n").unwrap();
        let b = Config::parse("lambda = 2e-4\nr_b = 900.0\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), Config::default().hash());
    }

    #[test]
    fn domain_gates() {
        let mut c = Config { r_min: 1000.0, ..Config::default() };
        assert!(c.check().is_err());
        c = Config { beta: 2.0, ..Config::default() };
        assert!(c.check().unwrap_err().to_string().contains("alpha"));
    }
}
