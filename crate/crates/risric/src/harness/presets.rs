//! Built-in experiment case presets mirroring the five measurement campaigns.

use super::scenario::ScenarioConfig;
use crate::channel::MeasurementConfig;
use crate::policy::WeightPolicy;

/// A named, ready-to-calibrate scenario.
#[derive(Debug, Clone)]
pub struct CasePreset {
    pub name: &'static str,
    pub description: &'static str,
    pub scenario: ScenarioConfig,
}

fn base(case: &str, n_ue: usize, path_gain_db: Vec<f64>, policy: WeightPolicy, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        case: case.to_string(),
        n_x: 4,
        n_y: 19,
        n_state: 4,
        n_ue,
        path_gain_db,
        noise_var: 1.0,
        // Pre-calibration scale: 0 dBFS noise power, shifted by calibrate().
        noise_floor_dbm: 0.0,
        h_los: None,
        policy,
        trials: 300,
        seed,
        step_ms: 10,
        n_prb: 106,
        carrier_hz: 4.9e9,
        amplitude: 1.0,
        ewma_beta: 0.1,
        delivery_snr50_db: None,
        delivery_exponent: 1.0,
        sweeps: 1,
        recompute_weights: true,
        objective_domain: Default::default(),
        polarization: Default::default(),
        cqi_thresholds_db: None,
        cqi_spectral_efficiency: None,
        meas: MeasurementConfig {
            k_samples: 16,
            n_re: 4,
            tx_power_dbm: 0.0,
            dbfs_to_dbm_offset: 0.0,
            rsrp_noise_std: 0.0,
            rsrp_averaging: Default::default(),
        },
    }
}

/// The five built-in cases.
pub fn builtin_cases() -> Vec<CasePreset> {
    vec![
        CasePreset {
            name: "case1",
            description: "single UE, RIS optimized for it",
            scenario: base("case1", 1, vec![0.0], WeightPolicy::Equal, 101),
        },
        CasePreset {
            name: "case2",
            description: "two symmetric UEs, optimization for the reference UE only",
            scenario: base("case2", 2, vec![0.0, 0.0], WeightPolicy::ReferenceUe(0), 102),
        },
        CasePreset {
            name: "case3",
            description: "two symmetric UEs, equal weights (fairness)",
            scenario: base("case3", 2, vec![0.0, 0.0], WeightPolicy::Equal, 103),
        },
        CasePreset {
            name: "case4",
            description: "asymmetric UEs (weak UE -8 dB), proportional-fair weights",
            scenario: {
                let mut sc = base(
                    "case4",
                    2,
                    vec![0.0, -8.0],
                    WeightPolicy::ProportionalFair,
                    104,
                );
                // Throughput averaging over ~1 s of slots, not one control
                // step; the weight dynamics need the longer memory.
                sc.ewma_beta = 0.02;
                sc
            },
        },
        CasePreset {
            name: "case5",
            description: "asymmetric UEs (weak UE -8 dB), best-CQI weights",
            scenario: base("case5", 2, vec![-4.0, -12.0], WeightPolicy::BestCqi, 105),
        },
    ]
}

/// Looks a preset up by name.
pub fn find_case(name: &str) -> Option<ScenarioConfig> {
    builtin_cases().into_iter().find(|c| c.name == name).map(|c| c.scenario)
}
