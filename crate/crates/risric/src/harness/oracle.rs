//! Exhaustive-oracle comparison for small instances.

use super::scenario::ScenarioConfig;
use super::{streams, HarnessError};
use crate::derive_seed;
use crate::optimizer::{exhaustive_optimize, greedy_optimize, random_baseline, DirectEvaluator};
use crate::ric::RicRunParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Objectives of the three search strategies on one channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub n_elements: usize,
    pub n_state: u8,
    pub greedy_objective: f64,
    pub exhaustive_objective: f64,
    pub random_best_objective: f64,
    pub random_trials: u32,
    /// exhaustive - greedy, in dB of the weighted objective.
    pub gap_db: f64,
    pub greedy_states: Vec<u8>,
    pub exhaustive_states: Vec<u8>,
}

/// Runs greedy, exhaustive and a random baseline on the same instance.
///
/// Small N only: the exhaustive guard of `n_state^N <=`
/// [`crate::optimizer::EXHAUSTIVE_GUARD`] applies. Weights are frozen at
/// their initial values for all three so the comparison is apples to apples.
pub fn run_oracle(scenario: &ScenarioConfig, trial: u32) -> Result<OracleReport, HarnessError> {
    scenario.validate()?;
    let n = scenario.n_elements();
    let n_state = scenario.n_state;

    let evaluator = |params: &RicRunParams| {
        DirectEvaluator::new(
            params.channel.clone(),
            params.meas.clone(),
            params.service.clone(),
            params.initial_config.clone(),
            params.step_ms,
            params.meas_rng_seed,
        )
    };

    let params = scenario.ric_params(trial)?;
    let mut settings = scenario.optimizer_settings(trial);
    settings.recompute_weights = false;

    let mut ev = evaluator(&params);
    let (greedy_cfg, trace) = greedy_optimize(&mut ev, scenario.policy, &settings, n)?;

    let mut ev = evaluator(&params);
    let (best_cfg, best) =
        exhaustive_optimize(&mut ev, scenario.policy, n, n_state, scenario.objective_domain)?;

    let random_trials = 100;
    let mut ev = evaluator(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        scenario.seed,
        streams::RANDOM_BASELINE,
        u64::from(trial),
    ));
    let random_best = random_baseline(&mut ev, n, n_state, random_trials, &mut rng)?;

    Ok(OracleReport {
        n_elements: n,
        n_state,
        greedy_objective: trace.final_objective(),
        exhaustive_objective: best,
        random_best_objective: random_best,
        random_trials,
        gap_db: best - trace.final_objective(),
        greedy_states: greedy_cfg.states,
        exhaustive_states: best_cfg.states,
    })
}
