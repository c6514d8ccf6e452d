//! Stochastic channel model and SS-RSRP measurement chain.
//!
//! One realization holds the gNB→RIS vector `h`, a RIS→UE vector `g` per UE
//! and a direct gNB→UE gain `h_los` (zero in the blocked-LoS scenario). The
//! effective downlink channel for a UE is `g^H Θ h + h_los` where `Θ` is the
//! diagonal reflection matrix derived from the discrete per-element states.
//! Received power is estimated from K unit-power pilot samples plus complex
//! Gaussian noise, and SS-RSRP combines N_RE per-resource-element power values
//! (dB-domain average by default) before an optional report-level jitter.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Floor returned instead of -inf when the measured power is exactly zero.
pub const ZERO_POWER_FLOOR_DBFS: f64 = -200.0;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid channel configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// How per-resource-element power values are combined into one SS-RSRP report.
///
/// The default averages the dBm values themselves; `Linear` averages linear
/// powers and converts back to dBm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RsrpAveraging {
    #[default]
    Db,
    Linear,
}

/// One channel draw: everything needed to measure any RIS configuration.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// gNB→RIS channel, one complex gain per RIS element.
    pub h: Vec<Complex64>,
    /// RIS→UE channels, one vector per UE, each the same length as `h`.
    pub g: Vec<Vec<Complex64>>,
    /// Direct gNB→UE gain per UE; all zero when the LoS path is blocked.
    pub h_los: Vec<Complex64>,
    /// Receiver noise variance per UE (linear power).
    pub noise_var: Vec<f64>,
    /// Seed the realization was drawn with.
    pub seed: u64,
}

impl ChannelRealization {
    pub fn new(
        h: Vec<Complex64>,
        g: Vec<Vec<Complex64>>,
        h_los: Vec<Complex64>,
        noise_var: Vec<f64>,
        seed: u64,
    ) -> Result<Self, ChannelError> {
        if g.is_empty() {
            return Err(ChannelError::Config("at least one UE required".into()));
        }
        if h.is_empty() {
            return Err(ChannelError::Config("at least one RIS element required".into()));
        }
        for (ue, gi) in g.iter().enumerate() {
            if gi.len() != h.len() {
                return Err(ChannelError::Dimension(format!(
                    "g[{ue}] has {} entries, h has {}",
                    gi.len(),
                    h.len()
                )));
            }
        }
        if h_los.len() != g.len() || noise_var.len() != g.len() {
            return Err(ChannelError::Dimension(format!(
                "per-UE vectors disagree: g={}, h_los={}, noise_var={}",
                g.len(),
                h_los.len(),
                noise_var.len()
            )));
        }
        if let Some(v) = noise_var.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(ChannelError::Config(format!("noise_var must be >= 0, got {v}")));
        }
        Ok(Self { h, g, h_los, noise_var, seed })
    }

    pub fn n_elements(&self) -> usize {
        self.h.len()
    }

    pub fn n_ues(&self) -> usize {
        self.g.len()
    }
}

/// Statistical parameters for one channel draw.
///
/// Entries of `h` and each `g[ue]` are i.i.d. circularly-symmetric complex
/// Gaussian; `path_gain_db[ue]` sets the mean power of the `g[ue]` entries.
#[derive(Debug, Clone)]
pub struct ChannelProfile {
    pub n_elements: usize,
    /// Per-UE average path gain of the RIS→UE link, in dB (0 dB = unit power).
    pub path_gain_db: Vec<f64>,
    /// Receiver noise variance, common to all UEs (linear power).
    pub noise_var: f64,
    /// Direct gNB→UE gains; `None` means blocked LoS (all zero).
    pub h_los: Option<Vec<Complex64>>,
}

/// Draws one channel realization; deterministic for a fixed seed.
pub fn draw_channel(profile: &ChannelProfile, seed: u64) -> Result<ChannelRealization, ChannelError> {
    if profile.n_elements == 0 {
        return Err(ChannelError::Config("n_elements must be positive".into()));
    }
    if profile.path_gain_db.is_empty() {
        return Err(ChannelError::Config("at least one UE required".into()));
    }
    if profile.noise_var < 0.0 || !profile.noise_var.is_finite() {
        return Err(ChannelError::Config(format!(
            "noise_var must be >= 0, got {}",
            profile.noise_var
        )));
    }
    let n_ue = profile.path_gain_db.len();
    if let Some(los) = &profile.h_los {
        if los.len() != n_ue {
            return Err(ChannelError::Dimension(format!(
                "h_los has {} entries for {} UEs",
                los.len(),
                n_ue
            )));
        }
    }

    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let h = draw_cn_vector(&mut rng, profile.n_elements, 1.0);
    let g = profile
        .path_gain_db
        .iter()
        .map(|gain_db| draw_cn_vector(&mut rng, profile.n_elements, 10f64.powf(gain_db / 10.0)))
        .collect();
    let h_los = profile
        .h_los
        .clone()
        .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); n_ue]);

    ChannelRealization::new(h, g, h_los, vec![profile.noise_var; n_ue], seed)
}

/// i.i.d. CN(0, power) entries: real and imaginary parts N(0, power/2).
fn draw_cn_vector(rng: &mut ChaCha8Rng, n: usize, power: f64) -> Vec<Complex64> {
    let std = (power / 2.0).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..n)
        .map(|_| Complex64::new(normal.sample(rng) * std, normal.sample(rng) * std))
        .collect()
}

/// Discrete per-element RIS state vector and the reflection map it induces.
///
/// The prototype's four states come from two PIN diodes; in the default
/// single-polarization model only the horizontal bit matters, so the lower
/// half of the state range maps to a 0° phase shift and the upper half to
/// 180°. Every diagonal entry has magnitude `amplitude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisConfiguration {
    pub states: Vec<u8>,
    pub n_x: usize,
    pub n_y: usize,
    pub n_state: u8,
    /// Common reflection amplitude α in (0, 1].
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_amplitude() -> f64 {
    1.0
}

impl RisConfiguration {
    pub fn new(
        states: Vec<u8>,
        n_x: usize,
        n_y: usize,
        n_state: u8,
        amplitude: f64,
    ) -> Result<Self, ChannelError> {
        if n_x == 0 || n_y == 0 {
            return Err(ChannelError::Config("n_x and n_y must be positive".into()));
        }
        if n_x * n_y != states.len() {
            return Err(ChannelError::Dimension(format!(
                "n_x * n_y = {} but {} states given",
                n_x * n_y,
                states.len()
            )));
        }
        if n_state < 2 {
            return Err(ChannelError::Config("n_state must be at least 2".into()));
        }
        if let Some(s) = states.iter().find(|s| **s >= n_state) {
            return Err(ChannelError::Config(format!(
                "state {s} out of range for n_state {n_state}"
            )));
        }
        if !(amplitude > 0.0 && amplitude <= 1.0) {
            return Err(ChannelError::Config(format!(
                "amplitude must be in (0, 1], got {amplitude}"
            )));
        }
        Ok(Self { states, n_x, n_y, n_state, amplitude })
    }

    /// All elements at state 0 (every PIN diode off, 0° phase shift).
    pub fn all_zero(n_x: usize, n_y: usize, n_state: u8) -> Self {
        Self::new(vec![0; n_x * n_y], n_x, n_y, n_state, 1.0).expect("valid all-zero config")
    }

    /// A 1 x n grid; grid shape is metadata only in the narrowband model.
    pub fn linear(n: usize, n_state: u8) -> Self {
        Self::all_zero(n, 1, n_state)
    }

    pub fn n_elements(&self) -> usize {
        self.states.len()
    }

    /// Phase shift of a state: lower half of the range 0°, upper half 180°.
    pub fn phase_rad(state: u8, n_state: u8) -> f64 {
        if state < n_state / 2 {
            0.0
        } else {
            PI
        }
    }

    /// Diagonal reflection coefficient of element `i`: α·e^{jφ}.
    pub fn coefficient(&self, i: usize) -> Complex64 {
        let phase = Self::phase_rad(self.states[i], self.n_state);
        Complex64::from_polar(self.amplitude, phase)
    }

    /// Flips the effective phase bit of every element (0° <-> 180°).
    pub fn flip_all_phases(&self) -> Self {
        let half = self.n_state / 2;
        let states = self
            .states
            .iter()
            .map(|&s| if s < half { s + half } else { s - half })
            .collect();
        Self { states, ..self.clone() }
    }
}

/// Measurement-chain parameters for received-power and SS-RSRP estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    /// K: pilot samples averaged per resource-element power estimate.
    pub k_samples: u32,
    /// N_RE: resource elements combined into one SS-RSRP value.
    pub n_re: u32,
    /// Pilot transmit power used in the dBFS→dBm calibration.
    pub tx_power_dbm: f64,
    /// Additive dBFS→dBm calibration constant (set by the harness).
    pub dbfs_to_dbm_offset: f64,
    /// Report-level measurement jitter, standard deviation in dB.
    pub rsrp_noise_std: f64,
    /// Per-RE combining rule; the printed formula averages dB values.
    #[serde(default)]
    pub rsrp_averaging: RsrpAveraging,
}

impl MeasurementConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.k_samples < 1 {
            return Err(ChannelError::Config("k_samples must be >= 1".into()));
        }
        if self.n_re < 1 {
            return Err(ChannelError::Config("n_re must be >= 1".into()));
        }
        if self.rsrp_noise_std < 0.0 || !self.rsrp_noise_std.is_finite() {
            return Err(ChannelError::Config(format!(
                "rsrp_noise_std must be >= 0, got {}",
                self.rsrp_noise_std
            )));
        }
        Ok(())
    }

    /// Total dBFS→dBm shift applied to each per-RE power value.
    pub fn dbm_shift(&self) -> f64 {
        self.dbfs_to_dbm_offset + self.tx_power_dbm
    }
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            k_samples: 16,
            n_re: 4,
            tx_power_dbm: 0.0,
            dbfs_to_dbm_offset: 0.0,
            rsrp_noise_std: 0.0,
            rsrp_averaging: RsrpAveraging::Db,
        }
    }
}

/// Effective downlink channel for one UE: `g[ue]^H Θ h + h_los[ue]`.
pub fn effective_channel(
    ch: &ChannelRealization,
    cfg: &RisConfiguration,
    ue: usize,
) -> Result<Complex64, ChannelError> {
    if ue >= ch.n_ues() {
        return Err(ChannelError::Dimension(format!(
            "UE index {ue} out of range for {} UEs",
            ch.n_ues()
        )));
    }
    if cfg.n_elements() != ch.n_elements() {
        return Err(ChannelError::Dimension(format!(
            "configuration has {} elements, channel has {}",
            cfg.n_elements(),
            ch.n_elements()
        )));
    }
    let sum: Complex64 = ch.g[ue]
        .iter()
        .zip(ch.h.iter())
        .enumerate()
        .map(|(i, (gi, hi))| gi.conj() * cfg.coefficient(i) * hi)
        .sum();
    Ok(sum + ch.h_los[ue])
}

/// Average received power over K pilot samples, in dBFS.
///
/// Simulates r[k] = effective·x[k] + n[k] with unit-magnitude random-phase
/// pilots and n[k] ~ CN(0, σ_n²), then returns 10·log10((1/K)·Σ|r[k]|²).
/// With zero noise the sample average equals |effective|² exactly, so the
/// pilot loop is skipped.
pub fn measure_power_dbfs(
    ch: &ChannelRealization,
    cfg: &RisConfiguration,
    ue: usize,
    meas: &MeasurementConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64, ChannelError> {
    meas.validate()?;
    let eff = effective_channel(ch, cfg, ue)?;
    let sigma2 = ch.noise_var[ue];

    let mean_power = if sigma2 == 0.0 {
        eff.norm_sqr()
    } else {
        let noise_std = (sigma2 / 2.0).sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let k = meas.k_samples as usize;
        let mut acc = 0.0;
        for _ in 0..k {
            let pilot = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
            let noise = Complex64::new(normal.sample(rng) * noise_std, normal.sample(rng) * noise_std);
            acc += (eff * pilot + noise).norm_sqr();
        }
        acc / k as f64
    };

    if mean_power == 0.0 {
        Ok(ZERO_POWER_FLOOR_DBFS)
    } else {
        Ok(10.0 * mean_power.log10())
    }
}

/// Combines per-RE dBm power values into one SS-RSRP value.
pub fn combine_re_powers_dbm(per_re_dbm: &[f64], averaging: RsrpAveraging) -> f64 {
    match averaging {
        RsrpAveraging::Db => per_re_dbm.iter().sum::<f64>() / per_re_dbm.len() as f64,
        RsrpAveraging::Linear => {
            let mean = per_re_dbm.iter().map(|p| 10f64.powf(p / 10.0)).sum::<f64>()
                / per_re_dbm.len() as f64;
            10.0 * mean.log10()
        }
    }
}

/// One SS-RSRP report in dBm for a UE under the given RIS configuration.
///
/// Measures N_RE independent per-RE powers, converts each to dBm with the
/// calibration shift, combines them per `rsrp_averaging` and finally adds the
/// report-level Gaussian jitter.
pub fn measure_ss_rsrp(
    ch: &ChannelRealization,
    cfg: &RisConfiguration,
    ue: usize,
    meas: &MeasurementConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64, ChannelError> {
    meas.validate()?;
    let shift = meas.dbm_shift();
    let per_re: Vec<f64> = (0..meas.n_re)
        .map(|_| measure_power_dbfs(ch, cfg, ue, meas, rng).map(|p| p + shift))
        .collect::<Result<_, _>>()?;
    let mut rsrp = combine_re_powers_dbm(&per_re, meas.rsrp_averaging);
    if meas.rsrp_noise_std > 0.0 {
        let jitter = Normal::new(0.0, meas.rsrp_noise_std).expect("jitter std validated");
        rsrp += jitter.sample(rng);
    }
    Ok(rsrp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive_seed;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn single_ue_channel(h: Vec<Complex64>, g: Vec<Complex64>, noise_var: f64) -> ChannelRealization {
        let n_ue = 1;
        ChannelRealization::new(
            h,
            vec![g],
            vec![Complex64::new(0.0, 0.0); n_ue],
            vec![noise_var; n_ue],
            0,
        )
        .unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn draw_is_deterministic_for_fixed_seed() {
        let profile = ChannelProfile {
            n_elements: 8,
            path_gain_db: vec![0.0, -3.0],
            noise_var: 0.5,
            h_los: None,
        };
        let a = draw_channel(&profile, 7).unwrap();
        let b = draw_channel(&profile, 7).unwrap();
        assert_eq!(a.h, b.h);
        assert_eq!(a.g, b.g);
        assert_eq!(a.h_los, b.h_los);
        let c = draw_channel(&profile, 8).unwrap();
        assert_ne!(a.h, c.h);
    }

    #[test]
    fn path_gain_offset_matches_sample_mean_oracle() {
        // E[|g2|^2] / E[|g1|^2] = 0.1 for a -10 dB offset, within 5%.
        let profile = ChannelProfile {
            n_elements: 4,
            path_gain_db: vec![0.0, -10.0],
            noise_var: 0.0,
            h_los: None,
        };
        let draws = 100_000;
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        for i in 0..draws {
            let ch = draw_channel(&profile, derive_seed(11, 0, i)).unwrap();
            p1 += ch.g[0].iter().map(|z| z.norm_sqr()).sum::<f64>();
            p2 += ch.g[1].iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let ratio = p2 / p1;
        assert!((ratio - 0.1).abs() / 0.1 < 0.05, "ratio {ratio}");
    }

    #[test]
    fn unset_los_means_blocked_los() {
        let profile = ChannelProfile {
            n_elements: 3,
            path_gain_db: vec![0.0, 0.0],
            noise_var: 1.0,
            h_los: None,
        };
        let ch = draw_channel(&profile, 1).unwrap();
        assert!(ch.h_los.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_elements_or_ues_rejected() {
        let profile = ChannelProfile {
            n_elements: 0,
            path_gain_db: vec![0.0],
            noise_var: 1.0,
            h_los: None,
        };
        assert!(draw_channel(&profile, 1).is_err());
        let profile = ChannelProfile {
            n_elements: 4,
            path_gain_db: vec![],
            noise_var: 1.0,
            h_los: None,
        };
        assert!(draw_channel(&profile, 1).is_err());
    }

    #[test]
    fn effective_channel_identity_and_sign_flip() {
        let ch = single_ue_channel(vec![re(1.0)], vec![re(1.0)], 0.0);
        let cfg = RisConfiguration::new(vec![0], 1, 1, 4, 1.0).unwrap();
        let eff = effective_channel(&ch, &cfg, 0).unwrap();
        assert_relative_eq!(eff.re, 1.0);
        assert_relative_eq!(eff.im, 0.0);

        // States 2 and 3 carry the 180° horizontal bit.
        let cfg = RisConfiguration::new(vec![2], 1, 1, 4, 1.0).unwrap();
        let eff = effective_channel(&ch, &cfg, 0).unwrap();
        assert_relative_eq!(eff.re, -1.0, epsilon = 1e-12);
        assert_relative_eq!(eff.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn effective_channel_matches_hand_computed_sum() {
        let h = vec![
            Complex64::new(0.3, -0.7),
            Complex64::new(-1.1, 0.2),
            Complex64::new(0.05, 0.9),
        ];
        let g = vec![
            Complex64::new(-0.4, 0.6),
            Complex64::new(0.8, 0.1),
            Complex64::new(-0.2, -0.3),
        ];
        let states = vec![1u8, 3, 2];
        let amplitude = 0.8;
        let cfg = RisConfiguration::new(states.clone(), 3, 1, 4, amplitude).unwrap();
        let ch = single_ue_channel(h.clone(), g.clone(), 0.0);

        let mut expected = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            let phi = if states[i] >= 2 { PI } else { 0.0 };
            expected += g[i].conj() * Complex64::from_polar(amplitude, phi) * h[i];
        }
        let eff = effective_channel(&ch, &cfg, 0).unwrap();
        assert_relative_eq!(eff.re, expected.re, epsilon = 1e-12);
        assert_relative_eq!(eff.im, expected.im, epsilon = 1e-12);
    }

    #[test]
    fn effective_channel_length_mismatch_errors() {
        let ch = single_ue_channel(vec![re(1.0), re(1.0)], vec![re(1.0), re(1.0)], 0.0);
        let cfg = RisConfiguration::all_zero(1, 1, 4);
        assert!(matches!(
            effective_channel(&ch, &cfg, 0),
            Err(ChannelError::Dimension(_))
        ));
        assert!(effective_channel(&ch, &RisConfiguration::all_zero(2, 1, 4), 1).is_err());
    }

    #[test]
    fn noiseless_power_is_exact_and_k_independent() {
        let ch = single_ue_channel(vec![re(1.0)], vec![re(1.0)], 0.0);
        let cfg = RisConfiguration::all_zero(1, 1, 4);
        for k in [1u32, 10, 10_000] {
            let meas = MeasurementConfig { k_samples: k, ..Default::default() };
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let p = measure_power_dbfs(&ch, &cfg, 0, &meas, &mut rng).unwrap();
            assert_relative_eq!(p, 0.0, epsilon = 1e-12);
        }

        // |effective| = 0.1 -> -20 dBFS.
        let ch = single_ue_channel(vec![re(0.1)], vec![re(1.0)], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = measure_power_dbfs(&ch, &cfg, 0, &MeasurementConfig::default(), &mut rng).unwrap();
        assert_relative_eq!(p, -20.0, epsilon = 1e-9);
    }

    #[test]
    fn noisy_power_matches_signal_plus_noise_expectation() {
        // effective = 1, sigma^2 = 0.01, K = 1e4 -> 10*log10(1.01) +/- 0.1 dB.
        let ch = single_ue_channel(vec![re(1.0)], vec![re(1.0)], 0.01);
        let cfg = RisConfiguration::all_zero(1, 1, 4);
        let meas = MeasurementConfig { k_samples: 10_000, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = measure_power_dbfs(&ch, &cfg, 0, &meas, &mut rng).unwrap();
        assert!((p - 10.0 * 1.01f64.log10()).abs() < 0.1, "p = {p}");
    }

    #[test]
    fn zero_power_hits_floor_not_neg_infinity() {
        let ch = single_ue_channel(vec![re(0.0)], vec![re(1.0)], 0.0);
        let cfg = RisConfiguration::all_zero(1, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = measure_power_dbfs(&ch, &cfg, 0, &MeasurementConfig::default(), &mut rng).unwrap();
        assert_eq!(p, ZERO_POWER_FLOOR_DBFS);
    }

    #[test]
    fn rsrp_constant_input_is_exact_for_any_n_re() {
        // 0 dBFS calibrated to -100 dBm, no jitter: exactly -100 for any N_RE.
        let ch = single_ue_channel(vec![re(1.0)], vec![re(1.0)], 0.0);
        let cfg = RisConfiguration::all_zero(1, 1, 4);
        for n_re in [1u32, 2, 7] {
            let meas = MeasurementConfig {
                n_re,
                dbfs_to_dbm_offset: -100.0,
                ..Default::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let rsrp = measure_ss_rsrp(&ch, &cfg, 0, &meas, &mut rng).unwrap();
            assert_relative_eq!(rsrp, -100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn db_average_is_arithmetic_mean_of_db_values() {
        assert_relative_eq!(
            combine_re_powers_dbm(&[-100.0, -90.0], RsrpAveraging::Db),
            -95.0
        );
        // Linear averaging of the same pair lands closer to the stronger RE.
        let lin = combine_re_powers_dbm(&[-100.0, -90.0], RsrpAveraging::Linear);
        assert_relative_eq!(lin, 10.0 * ((1e-10 + 1e-9) / 2.0f64).log10(), epsilon = 1e-12);
        assert!(lin > -95.0);
    }

    #[test]
    fn pure_noise_rsrp_matches_noise_power_level() {
        // h_los = 0 and g = 0: SS-RSRP = 10*log10(sigma^2) + shift within
        // 0.2 dB for K >= 1e4.
        let sigma2 = 0.25;
        let ch = single_ue_channel(vec![re(0.0)], vec![re(0.0)], sigma2);
        let cfg = RisConfiguration::all_zero(1, 1, 4);
        let meas = MeasurementConfig {
            k_samples: 10_000,
            n_re: 2,
            dbfs_to_dbm_offset: -100.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rsrp = measure_ss_rsrp(&ch, &cfg, 0, &meas, &mut rng).unwrap();
        let expected = 10.0 * sigma2.log10() - 100.0;
        assert!((rsrp - expected).abs() < 0.2, "rsrp {rsrp} expected {expected}");
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        assert!(RisConfiguration::new(vec![0, 0, 0], 2, 2, 4, 1.0).is_err());
        assert!(RisConfiguration::new(vec![4], 1, 1, 4, 1.0).is_err());
        assert!(RisConfiguration::new(vec![0], 1, 1, 4, 0.0).is_err());
        assert!(RisConfiguration::new(vec![0], 1, 1, 4, 1.5).is_err());
        assert!(RisConfiguration::new(vec![0], 1, 1, 1, 1.0).is_err());
    }

    #[test]
    fn n_state_two_has_two_effective_phases() {
        assert_eq!(RisConfiguration::phase_rad(0, 2), 0.0);
        assert_eq!(RisConfiguration::phase_rad(1, 2), PI);
        assert_eq!(RisConfiguration::phase_rad(1, 4), 0.0);
        assert_eq!(RisConfiguration::phase_rad(2, 4), PI);
    }
}
