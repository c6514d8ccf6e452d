//! Scenario configuration: the single document describing one experiment.
//!
//! Scenario files are TOML key/value documents whose keys mirror the struct
//! fields exactly; unknown keys are errors so a typo cannot silently change
//! an experiment.

use super::{streams, HarnessError};
use crate::channel::{ChannelProfile, MeasurementConfig, RisConfiguration};
use crate::derive_seed;
use crate::optimizer::OptimizerSettings;
use crate::policy::{CqiTables, ObjectiveDomain, ServiceModel, WeightPolicy};
use crate::ric::RicRunParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Slot duration for the 15 kHz subcarrier spacing the testbed uses.
const SLOT_SECONDS: f64 = 1e-3;

/// Polarization model; only single-polarization is implemented, `dual` is a
/// reserved hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    #[default]
    Single,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Label carried into summary rows.
    #[serde(default = "default_case")]
    pub case: String,
    /// RIS grid shape; N = n_x * n_y. The shape only matters for trace
    /// indexing in the narrowband model.
    #[serde(default = "default_n_x")]
    pub n_x: usize,
    #[serde(default = "default_n_y")]
    pub n_y: usize,
    /// Discrete states per element.
    #[serde(default = "default_n_state")]
    pub n_state: u8,
    pub n_ue: usize,
    /// Per-UE average path gain of the RIS→UE link, dB.
    pub path_gain_db: Vec<f64>,
    /// Receiver noise variance, linear power, common to all UEs.
    #[serde(default = "default_noise_var")]
    pub noise_var: f64,
    /// Noise floor on the calibrated dBm scale, used for CQI quantization.
    /// Calibration co-shifts it with the dBFS→dBm offset so SNR is preserved.
    pub noise_floor_dbm: f64,
    /// Optional per-UE direct gNB→UE gain as [re, im] pairs; omitted means
    /// blocked LoS (all zero).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_los: Option<Vec<[f64; 2]>>,
    pub policy: WeightPolicy,
    #[serde(default = "default_trials")]
    pub trials: u32,
    pub seed: u64,
    #[serde(default = "default_step_ms")]
    pub step_ms: u64,
    #[serde(default = "default_n_prb")]
    pub n_prb: u32,
    /// Carrier frequency, metadata only.
    #[serde(default = "default_carrier_hz")]
    pub carrier_hz: f64,
    /// Reflection amplitude α common to all elements.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Throughput EWMA smoothing per control step.
    #[serde(default = "default_ewma_beta")]
    pub ewma_beta: f64,
    /// SNR at which downlink delivery efficiency is 0.5; omitted means ideal
    /// delivery (served throughput equals the nominal TBS rate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delivery_snr50_db: Option<f64>,
    /// Sharpness of the delivery-efficiency curve.
    #[serde(default = "default_delivery_exponent")]
    pub delivery_exponent: f64,
    #[serde(default = "default_sweeps")]
    pub sweeps: u32,
    #[serde(default = "default_recompute_weights")]
    pub recompute_weights: bool,
    #[serde(default)]
    pub objective_domain: ObjectiveDomain,
    #[serde(default)]
    pub polarization: Polarization,
    /// Optional CQI table overrides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cqi_thresholds_db: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cqi_spectral_efficiency: Option<Vec<f64>>,
    pub meas: MeasurementConfig,
}

fn default_case() -> String {
    "custom".into()
}
fn default_n_x() -> usize {
    4
}
fn default_n_y() -> usize {
    19
}
fn default_n_state() -> u8 {
    4
}
fn default_noise_var() -> f64 {
    1.0
}
fn default_trials() -> u32 {
    300
}
fn default_step_ms() -> u64 {
    10
}
fn default_n_prb() -> u32 {
    106
}
fn default_carrier_hz() -> f64 {
    4.9e9
}
fn default_amplitude() -> f64 {
    1.0
}
fn default_ewma_beta() -> f64 {
    0.1
}
fn default_sweeps() -> u32 {
    1
}
fn default_recompute_weights() -> bool {
    true
}
fn default_delivery_exponent() -> f64 {
    1.0
}

impl ScenarioConfig {
    pub fn n_elements(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_x == 0 || self.n_y == 0 {
            return Err(HarnessError::Config("n_x and n_y must be positive".into()));
        }
        if self.n_state < 2 {
            return Err(HarnessError::Config("n_state must be >= 2".into()));
        }
        if self.n_ue < 1 {
            return Err(HarnessError::Config("n_ue must be >= 1".into()));
        }
        if self.path_gain_db.len() != self.n_ue {
            return Err(HarnessError::Config(format!(
                "path_gain_db has {} entries for {} UEs",
                self.path_gain_db.len(),
                self.n_ue
            )));
        }
        if let Some(los) = &self.h_los {
            if los.len() != self.n_ue {
                return Err(HarnessError::Config(format!(
                    "h_los has {} entries for {} UEs",
                    los.len(),
                    self.n_ue
                )));
            }
        }
        if self.noise_var < 0.0 || !self.noise_var.is_finite() {
            return Err(HarnessError::Config("noise_var must be >= 0".into()));
        }
        if self.trials < 1 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        if self.step_ms < 1 {
            return Err(HarnessError::Config("step_ms must be >= 1".into()));
        }
        if self.n_prb < 1 {
            return Err(HarnessError::Config("n_prb must be >= 1".into()));
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return Err(HarnessError::Config("amplitude must be in (0, 1]".into()));
        }
        if !(self.ewma_beta > 0.0 && self.ewma_beta <= 1.0) {
            return Err(HarnessError::Config("ewma_beta must be in (0, 1]".into()));
        }
        if self.delivery_exponent <= 0.0 || !self.delivery_exponent.is_finite() {
            return Err(HarnessError::Config("delivery_exponent must be positive".into()));
        }
        if self.sweeps < 1 {
            return Err(HarnessError::Config("sweeps must be >= 1".into()));
        }
        if let WeightPolicy::ReferenceUe(i) = self.policy {
            if i >= self.n_ue {
                return Err(HarnessError::Config(format!(
                    "reference UE {i} out of range for {} UEs",
                    self.n_ue
                )));
            }
        }
        if self.polarization == Polarization::Dual {
            return Err(HarnessError::Config(
                "polarization = \"dual\" is a reserved hook and not implemented; use \"single\""
                    .into(),
            ));
        }
        self.meas.validate().map_err(HarnessError::Channel)?;
        self.cqi_tables().validate().map_err(HarnessError::Policy)?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let sc: ScenarioConfig =
            toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        toml::to_string_pretty(self).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn cqi_tables(&self) -> CqiTables {
        let mut tables = CqiTables::default();
        if let Some(t) = &self.cqi_thresholds_db {
            tables.thresholds_db = t.clone();
        }
        if let Some(se) = &self.cqi_spectral_efficiency {
            tables.spectral_efficiency = se.clone();
        }
        tables
    }

    pub fn channel_profile(&self) -> ChannelProfile {
        ChannelProfile {
            n_elements: self.n_elements(),
            path_gain_db: self.path_gain_db.clone(),
            noise_var: self.noise_var,
            h_los: self
                .h_los
                .as_ref()
                .map(|los| los.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()),
        }
    }

    pub fn service_model(&self) -> ServiceModel {
        ServiceModel {
            noise_floor_dbm: self.noise_floor_dbm,
            n_prb: self.n_prb,
            slot_seconds: SLOT_SECONDS,
            ewma_beta: self.ewma_beta,
            delivery_snr50_db: self.delivery_snr50_db,
            delivery_exponent: self.delivery_exponent,
            tables: self.cqi_tables(),
        }
    }

    pub fn optimizer_settings(&self, trial: u32) -> OptimizerSettings {
        OptimizerSettings {
            n_state: self.n_state,
            element_order_seed: derive_seed(self.seed, streams::ELEMENT_ORDER, u64::from(trial)),
            sweeps: self.sweeps,
            recompute_weights: self.recompute_weights,
            objective_domain: self.objective_domain,
        }
    }

    pub fn initial_config(&self) -> RisConfiguration {
        let mut cfg = RisConfiguration::all_zero(self.n_x, self.n_y, self.n_state);
        cfg.amplitude = self.amplitude;
        cfg
    }

    /// Everything the RIC loop needs for one trial; channel and RNG seeds are
    /// derived from the scenario seed and the trial index.
    pub fn ric_params(&self, trial: u32) -> Result<RicRunParams, HarnessError> {
        let channel = crate::channel::draw_channel(
            &self.channel_profile(),
            derive_seed(self.seed, streams::CHANNEL, u64::from(trial)),
        )?;
        Ok(RicRunParams {
            channel,
            initial_config: self.initial_config(),
            meas: self.meas.clone(),
            service: self.service_model(),
            policy: self.policy,
            settings: self.optimizer_settings(trial),
            step_ms: self.step_ms,
            meas_rng_seed: derive_seed(self.seed, streams::MEASUREMENT, u64::from(trial)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> &'static str {
        r#"
            n_ue = 2
            path_gain_db = [0.0, -8.0]
            noise_floor_dbm = -129.0
            policy = "equal"
            seed = 7

            [meas]
            k_samples = 16
            n_re = 4
            tx_power_dbm = 0.0
            dbfs_to_dbm_offset = -128.0
            rsrp_noise_std = 0.0
        "#
    }

    #[test]
    fn parses_minimal_scenario_with_defaults() {
        let sc = ScenarioConfig::from_toml_str(minimal_toml()).unwrap();
        assert_eq!(sc.n_elements(), 76);
        assert_eq!(sc.n_state, 4);
        assert_eq!(sc.trials, 300);
        assert_eq!(sc.step_ms, 10);
        assert_eq!(sc.n_prb, 106);
        assert_eq!(sc.policy, WeightPolicy::Equal);
        assert_eq!(sc.polarization, Polarization::Single);
    }

    /// Inserts top-level lines before the `[meas]` table.
    fn with_top_level(extra: &str) -> String {
        minimal_toml().replace("[meas]", &format!("{extra}\n\n            [meas]"))
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ScenarioConfig::from_toml_str(&with_top_level("mystery_knob = 3")).unwrap_err();
        assert!(err.to_string().contains("mystery_knob"), "got: {err}");
        // Same inside the nested measurement table.
        let text = format!("{}\nmystery_meas_knob = 3\n", minimal_toml());
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn reference_policy_parses_and_is_range_checked() {
        let text = minimal_toml().replace("policy = \"equal\"", "policy = { reference_ue = 1 }");
        let sc = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(sc.policy, WeightPolicy::ReferenceUe(1));

        let text = minimal_toml().replace("policy = \"equal\"", "policy = { reference_ue = 2 }");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn path_gain_arity_must_match_n_ue() {
        let text = minimal_toml().replace("path_gain_db = [0.0, -8.0]", "path_gain_db = [0.0]");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn dual_polarization_is_reserved() {
        let err =
            ScenarioConfig::from_toml_str(&with_top_level("polarization = \"dual\"")).unwrap_err();
        assert!(err.to_string().contains("reserved"));
    }

    #[test]
    fn toml_round_trip_preserves_scenario() {
        let sc = ScenarioConfig::from_toml_str(minimal_toml()).unwrap();
        let text = sc.to_toml_string().unwrap();
        let back = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(sc, back);
    }

    #[test]
    fn cqi_table_overrides_apply() {
        let thresholds = (0..15).map(|k| format!("{}.0", k * 3 - 10)).collect::<Vec<_>>().join(", ");
        let sc = ScenarioConfig::from_toml_str(&with_top_level(&format!(
            "cqi_thresholds_db = [{thresholds}]"
        )))
        .unwrap();
        assert_eq!(sc.cqi_tables().thresholds_db[0], -10.0);
        // Wrong arity rejected.
        let bad = with_top_level("cqi_thresholds_db = [1.0, 2.0]");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
    }
}
