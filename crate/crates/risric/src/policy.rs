//! Operator weight policies and the service-state proxies they consume.
//!
//! Three weighting methods drive the weighted-sum SS-RSRP objective: equal
//! weights, a proportional-fair ratio TBS_i / R_DLSCH,i, and weights
//! proportional to CQI. A fourth degenerate policy pins all weight on one
//! reference UE. CQI is quantized from SNR through a fixed threshold table,
//! TBS through a spectral-efficiency proxy, and the served throughput through
//! an exponentially weighted moving average.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Floor keeping the proportional-fair denominator strictly positive.
pub const EWMA_FLOOR_BPS: f64 = 1e3;

/// Subcarriers per PRB times OFDM symbols per slot.
const RE_PER_PRB_PER_SLOT: f64 = 12.0 * 14.0;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("service state list is empty")]
    EmptyStates,
    #[error("reference UE index {index} out of range for {n_ue} UEs")]
    ReferenceOutOfRange { index: usize, n_ue: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Snapshot of one UE's service quality, as carried in KPM reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeServiceState {
    /// Channel quality indicator in [1, 15].
    pub cqi: u8,
    /// Transport block size deliverable in one slot, bits.
    pub tbs_bits: u64,
    /// EWMA of the served downlink throughput R_DLSCH, bits/s.
    pub throughput_ewma_bps: f64,
    /// Most recent SS-RSRP report, dBm.
    pub last_rsrp_dbm: f64,
}

/// Normalized per-UE weights; non-negative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Operator policy selecting how per-UE weights are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightPolicy {
    /// Method 1: every UE gets 1 / N_UE.
    Equal,
    /// Method 2: raw ratio TBS_i / R_DLSCH,i, normalized to sum one.
    ProportionalFair,
    /// Method 3: CQI_i / sum of CQIs.
    BestCqi,
    /// Single-UE optimization: weight 1 on the reference UE, 0 elsewhere.
    ReferenceUe(usize),
}

/// Domain in which the weighted-sum objective is evaluated.
///
/// The default sums the dBm values themselves; `Linear` sums the linear
/// powers and converts the weighted mean back to dBm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveDomain {
    #[default]
    Db,
    Linear,
}

/// Computes the normalized weight vector for a policy.
pub fn compute_weights(
    policy: WeightPolicy,
    states: &[UeServiceState],
) -> Result<WeightVector, PolicyError> {
    if states.is_empty() {
        return Err(PolicyError::EmptyStates);
    }
    let n = states.len();
    let weights = match policy {
        WeightPolicy::Equal => vec![1.0 / n as f64; n],
        WeightPolicy::ProportionalFair => {
            // throughput_ewma_bps > 0 is a UeServiceState invariant, kept by
            // the EWMA floor upstream.
            let raw: Vec<f64> = states
                .iter()
                .map(|s| s.tbs_bits as f64 / s.throughput_ewma_bps)
                .collect();
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|r| r / sum).collect()
        }
        WeightPolicy::BestCqi => {
            let sum: f64 = states.iter().map(|s| f64::from(s.cqi)).sum();
            states.iter().map(|s| f64::from(s.cqi) / sum).collect()
        }
        WeightPolicy::ReferenceUe(index) => {
            if index >= n {
                return Err(PolicyError::ReferenceOutOfRange { index, n_ue: n });
            }
            let mut w = vec![0.0; n];
            w[index] = 1.0;
            w
        }
    };
    Ok(WeightVector { weights })
}

/// Weighted sum of per-UE SS-RSRP values in the dB domain.
pub fn weighted_rsrp(weights: &WeightVector, rsrp_dbm: &[f64]) -> Result<f64, PolicyError> {
    if weights.len() != rsrp_dbm.len() {
        return Err(PolicyError::Dimension(format!(
            "{} weights for {} RSRP values",
            weights.len(),
            rsrp_dbm.len()
        )));
    }
    Ok(weights
        .weights
        .iter()
        .zip(rsrp_dbm)
        .map(|(w, r)| w * r)
        .sum())
}

/// Weighted objective in the linear-power domain, returned in dBm.
pub fn weighted_rsrp_linear(weights: &WeightVector, rsrp_dbm: &[f64]) -> Result<f64, PolicyError> {
    if weights.len() != rsrp_dbm.len() {
        return Err(PolicyError::Dimension(format!(
            "{} weights for {} RSRP values",
            weights.len(),
            rsrp_dbm.len()
        )));
    }
    let lin: f64 = weights
        .weights
        .iter()
        .zip(rsrp_dbm)
        .map(|(w, r)| w * 10f64.powf(r / 10.0))
        .sum();
    Ok(10.0 * lin.log10())
}

/// Evaluates the weighted objective in the configured domain.
pub fn weighted_objective(
    domain: ObjectiveDomain,
    weights: &WeightVector,
    rsrp_dbm: &[f64],
) -> Result<f64, PolicyError> {
    match domain {
        ObjectiveDomain::Db => weighted_rsrp(weights, rsrp_dbm),
        ObjectiveDomain::Linear => weighted_rsrp_linear(weights, rsrp_dbm),
    }
}

/// CQI quantization thresholds and spectral-efficiency proxy table.
///
/// Fifteen SNR thresholds spaced 2 dB starting at -6 dB, and the 4-bit CQI
/// table's efficiencies from 0.1523 to 5.5547 bit/s/Hz. Both overridable per
/// scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqiTables {
    pub thresholds_db: Vec<f64>,
    pub spectral_efficiency: Vec<f64>,
}

impl Default for CqiTables {
    fn default() -> Self {
        Self {
            thresholds_db: (0..15).map(|k| -6.0 + 2.0 * k as f64).collect(),
            spectral_efficiency: vec![
                0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141, 2.4063, 2.7305,
                3.3223, 3.9023, 4.5234, 5.1152, 5.5547,
            ],
        }
    }
}

impl CqiTables {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.thresholds_db.len() != 15 || self.spectral_efficiency.len() != 15 {
            return Err(PolicyError::InvalidInput(format!(
                "CQI tables need 15 entries, got {} thresholds and {} efficiencies",
                self.thresholds_db.len(),
                self.spectral_efficiency.len()
            )));
        }
        if self.thresholds_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PolicyError::InvalidInput(
                "CQI thresholds must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Quantizes SNR = rsrp - noise_floor through the threshold table.
///
/// Intervals are half-open and lower-inclusive: SNR exactly on threshold k
/// (1-based) yields CQI k+1, clamped to [1, 15].
pub fn cqi_from_rsrp(rsrp_dbm: f64, noise_floor_dbm: f64, tables: &CqiTables) -> u8 {
    let snr = rsrp_dbm - noise_floor_dbm;
    let crossed = tables.thresholds_db.iter().filter(|t| snr >= **t).count() as u8;
    (1 + crossed).clamp(1, 15)
}

/// TBS proxy: floor(SE(cqi) · n_prb · 12 subcarriers · 14 symbols) bits.
pub fn tbs_proxy(cqi: u8, n_prb: u32, tables: &CqiTables) -> Result<u64, PolicyError> {
    if !(1..=15).contains(&cqi) {
        return Err(PolicyError::InvalidInput(format!("CQI {cqi} out of [1, 15]")));
    }
    if n_prb < 1 {
        return Err(PolicyError::InvalidInput("n_prb must be >= 1".into()));
    }
    let se = tables.spectral_efficiency[usize::from(cqi) - 1];
    Ok((se * f64::from(n_prb) * RE_PER_PRB_PER_SLOT).floor() as u64)
}

/// Functional EWMA update of the served throughput.
///
/// new = (1 - beta)·old + beta·served, floored at [`EWMA_FLOOR_BPS`] so the
/// proportional-fair ratio stays defined.
pub fn update_throughput_ewma(state: &UeServiceState, served_bps: f64, beta: f64) -> UeServiceState {
    assert!(beta > 0.0 && beta <= 1.0, "beta must be in (0, 1], got {beta}");
    assert!(served_bps >= 0.0, "served_bps must be >= 0, got {served_bps}");
    let ewma = ((1.0 - beta) * state.throughput_ewma_bps + beta * served_bps).max(EWMA_FLOOR_BPS);
    UeServiceState { throughput_ewma_bps: ewma, ..state.clone() }
}

/// Derives per-UE service states from SS-RSRP reports.
///
/// Maps a report to CQI, TBS and served throughput (every UE is scheduled
/// every slot), then folds the throughput into the EWMA. The served
/// throughput is goodput: the nominal TBS rate scaled by an SNR-dependent
/// delivery efficiency, so the proportional-fair ratio TBS/R sits
/// persistently above one for a UE in poor conditions and relaxes toward one
/// as its channel improves.
#[derive(Debug, Clone)]
pub struct ServiceModel {
    pub noise_floor_dbm: f64,
    pub n_prb: u32,
    pub slot_seconds: f64,
    pub ewma_beta: f64,
    /// SNR at which delivery efficiency is 0.5 (before the exponent); `None`
    /// models ideal delivery (goodput equals the nominal TBS rate).
    pub delivery_snr50_db: Option<f64>,
    /// Sharpness of the efficiency curve; 1.0 is the plain saturating ratio.
    pub delivery_exponent: f64,
    pub tables: CqiTables,
}

impl ServiceModel {
    /// Fraction of the nominal TBS rate actually delivered at a given SNR.
    ///
    /// η = (snr / (snr + snr50))^k in linear power; monotone in SNR,
    /// saturating at 1. Below the half-delivery point it behaves like
    /// (snr/snr50)^k, so the proportional-fair ratio TBS/R scales like
    /// snr^-k there.
    pub fn delivery_efficiency(&self, snr_db: f64) -> f64 {
        match self.delivery_snr50_db {
            None => 1.0,
            Some(snr50_db) => {
                let snr = 10f64.powf(snr_db / 10.0);
                let half = 10f64.powf(snr50_db / 10.0);
                (snr / (snr + half)).powf(self.delivery_exponent)
            }
        }
    }

    /// Folds one SS-RSRP report into a UE's service state.
    ///
    /// With no previous state the EWMA starts at the converged value for the
    /// current goodput, so proportional-fair weight ratios open at their
    /// steady-state values.
    pub fn observe(
        &self,
        prev: Option<&UeServiceState>,
        rsrp_dbm: f64,
    ) -> Result<UeServiceState, PolicyError> {
        let cqi = cqi_from_rsrp(rsrp_dbm, self.noise_floor_dbm, &self.tables);
        let tbs_bits = tbs_proxy(cqi, self.n_prb, &self.tables)?;
        let efficiency = self.delivery_efficiency(rsrp_dbm - self.noise_floor_dbm);
        let served_bps = efficiency * tbs_bits as f64 / self.slot_seconds;
        let throughput_ewma_bps = match prev {
            Some(p) => {
                update_throughput_ewma(p, served_bps, self.ewma_beta).throughput_ewma_bps
            }
            None => served_bps.max(EWMA_FLOOR_BPS),
        };
        Ok(UeServiceState { cqi, tbs_bits, throughput_ewma_bps, last_rsrp_dbm: rsrp_dbm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn state(cqi: u8, tbs_bits: u64, ewma: f64) -> UeServiceState {
        UeServiceState { cqi, tbs_bits, throughput_ewma_bps: ewma, last_rsrp_dbm: -100.0 }
    }

    #[test]
    fn equal_weights_two_ues() {
        let w = compute_weights(WeightPolicy::Equal, &[state(5, 100, 1e6), state(9, 200, 2e6)])
            .unwrap();
        assert_eq!(w.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn best_cqi_is_cqi_over_sum() {
        let w = compute_weights(WeightPolicy::BestCqi, &[state(15, 1, 1e6), state(5, 1, 1e6)])
            .unwrap();
        assert_relative_eq!(w.weights[0], 0.75);
        assert_relative_eq!(w.weights[1], 0.25);
    }

    #[test]
    fn proportional_fair_normalizes_raw_ratios() {
        // Raw ratios (1000/500, 1000/1000) = (2, 1) -> (2/3, 1/3).
        let w = compute_weights(
            WeightPolicy::ProportionalFair,
            &[state(1, 1000, 500.0), state(1, 1000, 1000.0)],
        )
        .unwrap();
        assert_relative_eq!(w.weights[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.weights[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn reference_ue_is_one_hot() {
        let s = [state(1, 1, 1e6), state(1, 1, 1e6), state(1, 1, 1e6)];
        let w = compute_weights(WeightPolicy::ReferenceUe(1), &s).unwrap();
        assert_eq!(w.weights, vec![0.0, 1.0, 0.0]);
        assert!(matches!(
            compute_weights(WeightPolicy::ReferenceUe(3), &s),
            Err(PolicyError::ReferenceOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_states_error() {
        assert!(matches!(
            compute_weights(WeightPolicy::Equal, &[]),
            Err(PolicyError::EmptyStates)
        ));
    }

    #[test]
    fn weighted_rsrp_examples() {
        let w = WeightVector { weights: vec![0.5, 0.5] };
        assert_relative_eq!(weighted_rsrp(&w, &[-100.0, -90.0]).unwrap(), -95.0);
        let w = WeightVector { weights: vec![1.0, 0.0] };
        assert_relative_eq!(weighted_rsrp(&w, &[-97.5, -40.0]).unwrap(), -97.5);
        let w = WeightVector { weights: vec![0.75, 0.25] };
        assert_relative_eq!(weighted_rsrp(&w, &[-100.0, -108.0]).unwrap(), -102.0);
        assert!(weighted_rsrp(&w, &[-100.0]).is_err());
    }

    #[test]
    fn cqi_clamps_and_tie_rule() {
        let t = CqiTables::default();
        // Below the lowest threshold.
        assert_eq!(cqi_from_rsrp(-110.0, -100.0, &t), 1);
        // Above the highest.
        assert_eq!(cqi_from_rsrp(-60.0, -100.0, &t), 15);
        // Exactly on threshold k (1-based) -> k + 1: t_1 = -6 dB.
        assert_eq!(cqi_from_rsrp(-106.0, -100.0, &t), 2);
        // Just below t_1.
        assert_eq!(cqi_from_rsrp(-106.0 - 1e-9, -100.0, &t), 1);
        // On t_5 = 2 dB -> CQI 6.
        assert_eq!(cqi_from_rsrp(-98.0, -100.0, &t), 6);
    }

    #[test]
    fn tbs_proxy_hand_oracle() {
        let t = CqiTables::default();
        // floor(0.1523 * 1 * 168) = floor(25.5864) = 25.
        assert_eq!(tbs_proxy(1, 1, &t).unwrap(), 25);
        // floor(5.5547 * 106 * 168) = floor(98918.0976) = 98918.
        assert_eq!(tbs_proxy(15, 106, &t).unwrap(), 98_918);
        assert!(tbs_proxy(1, 0, &t).is_err());
        assert!(tbs_proxy(0, 1, &t).is_err());
        assert!(tbs_proxy(16, 1, &t).is_err());
    }

    #[test]
    fn ewma_update_examples() {
        let s = state(1, 1, 1e6);
        assert_relative_eq!(
            update_throughput_ewma(&s, 5e5, 1.0).throughput_ewma_bps,
            5e5
        );
        assert_relative_eq!(
            update_throughput_ewma(&s, 0.0, 1.0).throughput_ewma_bps,
            EWMA_FLOOR_BPS
        );
        assert_relative_eq!(
            update_throughput_ewma(&s, 0.0, 0.1).throughput_ewma_bps,
            9e5
        );
    }

    #[test]
    fn ewma_converges_geometrically() {
        let beta = 0.25;
        let target = 4.2e6;
        let mut s = state(1, 1, 1e6);
        let steps = (0.01f64.ln() / (1.0f64 - beta).ln()).ceil() as usize;
        for _ in 0..steps {
            s = update_throughput_ewma(&s, target, beta);
        }
        assert!((s.throughput_ewma_bps - target).abs() / target < 0.01);
    }

    #[test]
    fn service_model_initializes_ewma_converged() {
        let m = ServiceModel {
            noise_floor_dbm: -120.0,
            n_prb: 106,
            slot_seconds: 1e-3,
            ewma_beta: 0.1,
            delivery_snr50_db: None,
            delivery_exponent: 1.0,
            tables: CqiTables::default(),
        };
        let s = m.observe(None, -105.0).unwrap();
        assert_relative_eq!(s.throughput_ewma_bps, s.tbs_bits as f64 / 1e-3);
        // Equal raw PF ratios across UEs with no history.
        let s2 = m.observe(None, -90.0).unwrap();
        let r1 = s.tbs_bits as f64 / s.throughput_ewma_bps;
        let r2 = s2.tbs_bits as f64 / s2.throughput_ewma_bps;
        assert_relative_eq!(r1, r2, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn weights_are_normalized_and_nonnegative(
            cqis in proptest::collection::vec(1u8..=15, 1..6),
            seed in 0u64..1000,
        ) {
            let states: Vec<UeServiceState> = cqis
                .iter()
                .enumerate()
                .map(|(i, &c)| state(
                    c,
                    1000 + (seed % 7) * 500 + i as u64 * 333,
                    1e4 + (seed as f64) * 17.0 + i as f64 * 5e3,
                ))
                .collect();
            for policy in [
                WeightPolicy::Equal,
                WeightPolicy::ProportionalFair,
                WeightPolicy::BestCqi,
                WeightPolicy::ReferenceUe(states.len() - 1),
            ] {
                let w = compute_weights(policy, &states).unwrap();
                prop_assert!(w.weights.iter().all(|x| *x >= 0.0));
                let sum: f64 = w.weights.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9, "sum {} for {:?}", sum, policy);
            }
        }

        #[test]
        fn weights_permute_covariantly(perm_seed in 0u64..100) {
            let states = vec![
                state(3, 10_000, 2e5),
                state(9, 45_000, 9e5),
                state(14, 80_000, 3e6),
            ];
            let mut idx = vec![0usize, 1, 2];
            // Tiny deterministic permutation from the seed.
            idx.rotate_left((perm_seed % 3) as usize);
            if perm_seed % 2 == 0 {
                idx.swap(0, 1);
            }
            let permuted: Vec<UeServiceState> = idx.iter().map(|&i| states[i].clone()).collect();
            for policy in [WeightPolicy::ProportionalFair, WeightPolicy::BestCqi] {
                let w = compute_weights(policy, &states).unwrap();
                let wp = compute_weights(policy, &permuted).unwrap();
                for (k, &i) in idx.iter().enumerate() {
                    prop_assert!((wp.weights[k] - w.weights[i]).abs() < 1e-12);
                }
            }
            let we = compute_weights(WeightPolicy::Equal, &permuted).unwrap();
            prop_assert!(we.weights.iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-12));
        }

        #[test]
        fn best_cqi_strictly_monotone(a in 1u8..15, delta in 1u8..5) {
            let b = (a + delta).min(15);
            prop_assume!(b > a);
            let w = compute_weights(
                WeightPolicy::BestCqi,
                &[state(b, 1, 1e6), state(a, 1, 1e6)],
            ).unwrap();
            prop_assert!(w.weights[0] > w.weights[1]);
        }

        #[test]
        fn pf_weight_decreases_in_history(r in 1e4f64..1e8, factor in 1.01f64..10.0) {
            let lo = compute_weights(
                WeightPolicy::ProportionalFair,
                &[state(1, 50_000, r), state(1, 50_000, 1e6)],
            ).unwrap();
            let hi = compute_weights(
                WeightPolicy::ProportionalFair,
                &[state(1, 50_000, r * factor), state(1, 50_000, 1e6)],
            ).unwrap();
            prop_assert!(hi.weights[0] < lo.weights[0]);
        }

        #[test]
        fn zero_weight_ue_cannot_move_objective(r0 in -140f64..-60.0, r1 in -140f64..-60.0) {
            let w = WeightVector { weights: vec![1.0, 0.0] };
            let a = weighted_rsrp(&w, &[r0, r1]).unwrap();
            let b = weighted_rsrp(&w, &[r0, r1 + 37.5]).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
