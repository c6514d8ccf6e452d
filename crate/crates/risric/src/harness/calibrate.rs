//! Calibration of the dBFS→dBm scale against the reported RSRP level.
//!
//! Shifts the additive calibration constant until the mean unoptimized
//! single-UE SS-RSRP over a fixed set of seeded draws sits at -110 dBm. The
//! noise floor is co-shifted by the same amount so SNR, and with it the CQI
//! mapping, is unchanged by calibration.

use super::scenario::ScenarioConfig;
use super::{streams, HarnessError};
use crate::channel::{draw_channel, measure_ss_rsrp, ChannelProfile};
use crate::derive_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Level the unoptimized single-UE campaign is anchored to.
pub const CALIBRATION_TARGET_DBM: f64 = -110.0;
/// Acceptable deviation of the calibration-set mean from the target.
pub const CALIBRATION_TOLERANCE_DB: f64 = 0.5;

const CALIBRATION_DRAWS: u64 = 100;
const MAX_PASSES: u32 = 8;

/// Returns the scenario with `dbfs_to_dbm_offset` (and the noise floor)
/// shifted so the unoptimized single-UE RSRP mean hits the target.
///
/// The shift is purely additive, so the procedure normally converges on the
/// second pass; a bounded number of passes guards against misuse.
pub fn calibrate(scenario: &ScenarioConfig) -> Result<ScenarioConfig, HarnessError> {
    scenario.validate()?;
    let mut sc = scenario.clone();
    for _ in 0..MAX_PASSES {
        let mean = mean_unoptimized_rsrp(&sc)?;
        let delta = CALIBRATION_TARGET_DBM - mean;
        if delta.abs() <= CALIBRATION_TOLERANCE_DB {
            return Ok(sc);
        }
        sc.meas.dbfs_to_dbm_offset += delta;
        sc.noise_floor_dbm += delta;
    }
    Err(HarnessError::Calibration(format!(
        "mean did not reach {CALIBRATION_TARGET_DBM} dBm within {MAX_PASSES} passes"
    )))
}

/// Mean SS-RSRP of UE 0 under the all-zero configuration over the seeded
/// calibration draws.
pub fn mean_unoptimized_rsrp(sc: &ScenarioConfig) -> Result<f64, HarnessError> {
    let profile = ChannelProfile {
        n_elements: sc.n_elements(),
        path_gain_db: vec![sc.path_gain_db[0]],
        noise_var: sc.noise_var,
        h_los: sc
            .channel_profile()
            .h_los
            .map(|los| vec![los[0]]),
    };
    let cfg = sc.initial_config();
    let mut acc = 0.0;
    for d in 0..CALIBRATION_DRAWS {
        let ch = draw_channel(&profile, derive_seed(sc.seed, streams::CAL_CHANNEL, d))?;
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(sc.seed, streams::CAL_MEASUREMENT, d));
        acc += measure_ss_rsrp(&ch, &cfg, 0, &sc.meas, &mut rng)?;
    }
    Ok(acc / CALIBRATION_DRAWS as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::MeasurementConfig;
    use crate::policy::WeightPolicy;
    use approx::assert_relative_eq;

    fn scenario() -> ScenarioConfig {
        ScenarioConfig {
            case: "cal-test".into(),
            n_x: 4,
            n_y: 19,
            n_state: 4,
            n_ue: 1,
            path_gain_db: vec![0.0],
            noise_var: 1.0,
            noise_floor_dbm: 0.0,
            h_los: None,
            policy: WeightPolicy::Equal,
            trials: 10,
            seed: 42,
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
            meas: MeasurementConfig::default(),
        }
    }

    #[test]
    fn post_calibration_mean_is_within_tolerance() {
        let sc = calibrate(&scenario()).unwrap();
        let mean = mean_unoptimized_rsrp(&sc).unwrap();
        assert!(
            (mean - CALIBRATION_TARGET_DBM).abs() <= CALIBRATION_TOLERANCE_DB,
            "mean {mean}"
        );
    }

    #[test]
    fn manual_offset_shift_moves_mean_exactly() {
        let mut sc = calibrate(&scenario()).unwrap();
        let before = mean_unoptimized_rsrp(&sc).unwrap();
        sc.meas.dbfs_to_dbm_offset += 10.0;
        let after = mean_unoptimized_rsrp(&sc).unwrap();
        assert_relative_eq!(after - before, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn calibration_is_deterministic() {
        let a = calibrate(&scenario()).unwrap();
        let b = calibrate(&scenario()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn snr_is_preserved_by_calibration() {
        let base = scenario();
        let sc = calibrate(&base).unwrap();
        let shift = sc.meas.dbfs_to_dbm_offset - base.meas.dbfs_to_dbm_offset;
        assert_relative_eq!(sc.noise_floor_dbm - base.noise_floor_dbm, shift, epsilon = 1e-12);
    }
}
