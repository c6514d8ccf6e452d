//! Multi-trial experiment campaigns.
//!
//! Each trial draws a fresh channel, runs the full RIC loop and records the
//! per-UE SS-RSRP before and after optimization. Trials are independent given
//! their derived seeds and run in parallel; results are aggregated in trial
//! order so output is identical to a sequential run.

use super::scenario::ScenarioConfig;
use super::HarnessError;
use crate::optimizer::OptimizationTrace;
use crate::ric::ro_xapp_run;
use rayon::prelude::*;
use thiserror::Error;

/// Before/after per-UE RSRP of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u32,
    pub initial_dbm: Vec<f64>,
    pub final_dbm: Vec<f64>,
}

impl TrialResult {
    /// improvement_i = final_i - initial_i.
    pub fn improvement_db(&self) -> Vec<f64> {
        self.final_dbm
            .iter()
            .zip(&self.initial_dbm)
            .map(|(f, i)| f - i)
            .collect()
    }
}

/// Per-UE aggregate over a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct UeSummary {
    pub ue_id: u32,
    pub mean_initial_dbm: f64,
    pub mean_final_dbm: f64,
    pub mean_improvement_db: f64,
    /// Sample standard deviation of the per-trial improvement.
    pub std_improvement_db: f64,
    pub trials: u32,
}

/// Everything a campaign produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub case: String,
    pub n_ue: usize,
    pub trial_results: Vec<TrialResult>,
    pub traces: Option<Vec<OptimizationTrace>>,
}

impl CampaignResult {
    pub fn empty(case: &str, n_ue: usize) -> Self {
        Self { case: case.to_string(), n_ue, trial_results: vec![], traces: Some(vec![]) }
    }

    pub fn summaries(&self) -> Vec<UeSummary> {
        let n = self.trial_results.len();
        (0..self.n_ue)
            .map(|ue| {
                let initial: Vec<f64> =
                    self.trial_results.iter().map(|t| t.initial_dbm[ue]).collect();
                let fin: Vec<f64> = self.trial_results.iter().map(|t| t.final_dbm[ue]).collect();
                let imp: Vec<f64> = fin.iter().zip(&initial).map(|(f, i)| f - i).collect();
                UeSummary {
                    ue_id: ue as u32,
                    mean_initial_dbm: mean(&initial),
                    mean_final_dbm: mean(&fin),
                    mean_improvement_db: mean(&imp),
                    std_improvement_db: sample_std(&imp),
                    trials: n as u32,
                }
            })
            .collect()
    }

    /// Mean per-UE improvement, in UE order.
    pub fn mean_improvements_db(&self) -> Vec<f64> {
        self.summaries().iter().map(|s| s.mean_improvement_db).collect()
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// A trial failed; completed trials before it are preserved.
#[derive(Debug, Error)]
#[error("campaign aborted at trial {trial}: {source}")]
pub struct CampaignError {
    pub trial: u32,
    #[source]
    pub source: HarnessError,
    pub partial: CampaignResult,
}

/// One trial: fresh channel draw, full RIC loop, before/after record.
pub fn run_trial(
    scenario: &ScenarioConfig,
    trial: u32,
) -> Result<(TrialResult, OptimizationTrace), HarnessError> {
    let params = scenario.ric_params(trial)?;
    let out = ro_xapp_run(params)?;
    let result = TrialResult {
        trial,
        initial_dbm: out.trace.baseline.per_ue_rsrp_dbm.clone(),
        final_dbm: out.trace.final_per_ue_rsrp().to_vec(),
    };
    Ok((result, out.trace))
}

/// Runs all trials of a calibrated scenario.
///
/// On a trial failure the campaign aborts; trials completed before the
/// failing index are returned inside the error so they can be flushed.
pub fn run_campaign(scenario: &ScenarioConfig) -> Result<CampaignResult, CampaignError> {
    if let Err(source) = scenario.validate() {
        return Err(CampaignError {
            trial: 0,
            source,
            partial: CampaignResult::empty(&scenario.case, scenario.n_ue),
        });
    }

    let outcomes: Vec<Result<(TrialResult, OptimizationTrace), HarnessError>> =
        (0..scenario.trials).into_par_iter().map(|t| run_trial(scenario, t)).collect();

    let mut trial_results = Vec::with_capacity(outcomes.len());
    let mut traces = Vec::with_capacity(outcomes.len());
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((result, trace)) => {
                trial_results.push(result);
                traces.push(trace);
            }
            Err(source) => {
                return Err(CampaignError {
                    trial: index as u32,
                    source,
                    partial: CampaignResult {
                        case: scenario.case.clone(),
                        n_ue: scenario.n_ue,
                        trial_results,
                        traces: Some(traces),
                    },
                });
            }
        }
    }

    Ok(CampaignResult {
        case: scenario.case.clone(),
        n_ue: scenario.n_ue,
        trial_results,
        traces: Some(traces),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::MeasurementConfig;
    use crate::policy::WeightPolicy;
    use approx::assert_relative_eq;

    fn small_scenario() -> ScenarioConfig {
        ScenarioConfig {
            case: "campaign-test".into(),
            n_x: 4,
            n_y: 2,
            n_state: 4,
            n_ue: 2,
            path_gain_db: vec![0.0, 0.0],
            noise_var: 0.0,
            noise_floor_dbm: -120.0,
            h_los: None,
            policy: WeightPolicy::Equal,
            trials: 6,
            seed: 9,
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
            meas: MeasurementConfig { dbfs_to_dbm_offset: -110.0, ..Default::default() },
        }
    }

    #[test]
    fn single_trial_campaign_equals_wrapped_run() {
        let mut sc = small_scenario();
        sc.trials = 1;
        let campaign = run_campaign(&sc).unwrap();
        let (direct, trace) = run_trial(&sc, 0).unwrap();
        assert_eq!(campaign.trial_results, vec![direct]);
        assert_eq!(campaign.traces.as_ref().unwrap()[0], trace);
    }

    #[test]
    fn campaign_is_deterministic_and_parallel_safe() {
        let sc = small_scenario();
        let a = run_campaign(&sc).unwrap();
        let b = run_campaign(&sc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_objective_never_degrades_noiselessly_under_equal_weights() {
        let sc = small_scenario();
        let result = run_campaign(&sc).unwrap();
        for (trial, trace) in result.traces.as_ref().unwrap().iter().enumerate() {
            assert!(
                trace.final_objective() >= trace.baseline.rsrp_ws,
                "trial {trial} degraded"
            );
        }
    }

    #[test]
    fn disjoint_seed_halves_agree_within_statistical_error() {
        let mut sc = small_scenario();
        sc.n_x = 4;
        sc.n_y = 4;
        sc.trials = 40;
        let full = run_campaign(&sc).unwrap();
        let half_mean: f64 = full.trial_results[..20]
            .iter()
            .map(|t| t.improvement_db()[0])
            .sum::<f64>()
            / 20.0;
        let full_mean = full.mean_improvements_db()[0];
        // Improvements spread a few dB per trial; half vs full means agree
        // within a generous multiple of the standard error.
        let std = full.summaries()[0].std_improvement_db;
        assert!(
            (half_mean - full_mean).abs() < 4.0 * std / (20f64).sqrt(),
            "half {half_mean} vs full {full_mean}, std {std}"
        );
    }

    #[test]
    fn summaries_recompute_from_trials() {
        let sc = small_scenario();
        let result = run_campaign(&sc).unwrap();
        let s = &result.summaries()[1];
        let manual: f64 = result
            .trial_results
            .iter()
            .map(|t| t.final_dbm[1] - t.initial_dbm[1])
            .sum::<f64>()
            / result.trial_results.len() as f64;
        assert_relative_eq!(s.mean_improvement_db, manual, epsilon = 1e-12);
        assert_relative_eq!(
            s.mean_improvement_db,
            s.mean_final_dbm - s.mean_initial_dbm,
            epsilon = 1e-9
        );
    }
}
