//! Greedy per-element RIS state search over the weighted-sum RSRP objective,
//! plus an exhaustive oracle and a random baseline.
//!
//! The greedy loop starts from the all-zero configuration, measures a
//! baseline, shuffles the element order, then for every element tries each
//! state in turn and keeps a candidate only if the weighted objective strictly
//! exceeds the running maximum. Weights are recomputed from the measurements
//! at every candidate unless frozen. Everything is driven through an
//! [`Evaluator`], which hides whether measurements come from a direct channel
//! call or the full RIC loop; one `evaluate` call advances simulated time by
//! exactly one control step.

use crate::channel::{
    measure_ss_rsrp, ChannelError, ChannelRealization, MeasurementConfig, RisConfiguration,
};
use crate::policy::{
    compute_weights, weighted_objective, ObjectiveDomain, PolicyError, ServiceModel,
    UeServiceState, WeightPolicy,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest state space `exhaustive_optimize` will enumerate.
pub const EXHAUSTIVE_GUARD: u128 = 1_000_000;

/// Failure surfaced by an evaluator (measurement or transport).
#[derive(Debug, Error)]
#[error("evaluator failure: {0}")]
pub struct EvalError(pub String);

impl From<ChannelError> for EvalError {
    fn from(e: ChannelError) -> Self {
        EvalError(e.to_string())
    }
}

impl From<PolicyError> for EvalError {
    fn from(e: PolicyError) -> Self {
        EvalError(e.to_string())
    }
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid optimizer settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("baseline measurement failed: {0}")]
    InitialMeasurement(#[source] EvalError),
    #[error("evaluator failed at iteration {iteration}: {source}")]
    Aborted {
        iteration: u32,
        #[source]
        source: EvalError,
        /// Trace rows completed before the failure.
        partial: Box<OptimizationTrace>,
    },
    #[error("search space of {space} configurations exceeds the guard of {guard}")]
    SearchSpaceTooLarge { space: u128, guard: u128 },
}

/// Measurement source for the optimizer.
///
/// `initial` reads the baseline under the currently applied configuration
/// without advancing time; `evaluate` applies a candidate, advances the clock
/// by one control step and returns the per-UE measurements taken under it;
/// `sync` restores a known configuration (a reversion) without a measurement
/// step. Calls must be serialized; the loop is inherently sequential.
pub trait Evaluator {
    fn initial(&mut self) -> Result<Vec<UeServiceState>, EvalError>;
    fn evaluate(&mut self, cfg: &RisConfiguration) -> Result<Vec<UeServiceState>, EvalError>;
    fn sync(&mut self, cfg: &RisConfiguration) -> Result<(), EvalError>;
    fn sim_time_ms(&self) -> u64;
}

/// Knobs of the greedy search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    /// Number of discrete states swept per element.
    pub n_state: u8,
    /// Seed for the element-order shuffle.
    pub element_order_seed: u64,
    /// Full passes over all elements.
    pub sweeps: u32,
    /// Recompute weights from the measurements at every candidate.
    pub recompute_weights: bool,
    /// Domain the weighted objective is evaluated in.
    pub objective_domain: ObjectiveDomain,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            n_state: 4,
            element_order_seed: 0,
            sweeps: 1,
            recompute_weights: true,
            objective_domain: ObjectiveDomain::Db,
        }
    }
}

impl OptimizerSettings {
    fn validate(&self) -> Result<(), OptimizeError> {
        if self.n_state < 2 {
            return Err(OptimizeError::Settings(format!(
                "n_state must be >= 2, got {}",
                self.n_state
            )));
        }
        if self.sweeps < 1 {
            return Err(OptimizeError::Settings("sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Baseline measured before the first candidate, at simulated time zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceBaseline {
    pub per_ue_rsrp_dbm: Vec<f64>,
    pub weights: Vec<f64>,
    pub rsrp_ws: f64,
}

/// One candidate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based candidate counter, strictly increasing.
    pub iteration: u32,
    pub element: u32,
    pub candidate_state: u8,
    pub per_ue_rsrp_dbm: Vec<f64>,
    pub per_ue_cqi: Vec<u8>,
    pub weights: Vec<f64>,
    pub rsrp_ws: f64,
    pub accepted: bool,
    pub sim_time_ms: u64,
}

/// Full per-iteration log of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub baseline: TraceBaseline,
    pub rows: Vec<TraceRow>,
    pub step_ms: u64,
}

impl OptimizationTrace {
    /// Per-UE RSRP of the final configuration: the measurement at the last
    /// accepted candidate, or the baseline when nothing was accepted.
    pub fn final_per_ue_rsrp(&self) -> &[f64] {
        self.rows
            .iter()
            .rev()
            .find(|r| r.accepted)
            .map(|r| r.per_ue_rsrp_dbm.as_slice())
            .unwrap_or(&self.baseline.per_ue_rsrp_dbm)
    }

    /// Final value of the running objective maximum.
    pub fn final_objective(&self) -> f64 {
        self.rows
            .iter()
            .rev()
            .find(|r| r.accepted)
            .map(|r| r.rsrp_ws)
            .unwrap_or(self.baseline.rsrp_ws)
    }

    /// Running RSRP_WS,max sequence: baseline value, then one entry per row.
    pub fn running_objective_max(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len() + 1);
        let mut max = self.baseline.rsrp_ws;
        out.push(max);
        for row in &self.rows {
            if row.accepted {
                max = row.rsrp_ws;
            }
            out.push(max);
        }
        out
    }

    pub fn accepted_count(&self) -> usize {
        self.rows.iter().filter(|r| r.accepted).count()
    }

    /// Rejected candidates that physically changed the surface and therefore
    /// required a reversion command.
    pub fn reversion_count(&self, n_elements: usize) -> usize {
        let mut incumbent = vec![0u8; n_elements];
        let mut reversions = 0;
        for row in &self.rows {
            let el = row.element as usize;
            if row.accepted {
                incumbent[el] = row.candidate_state;
            } else if row.candidate_state != incumbent[el] {
                reversions += 1;
            }
        }
        reversions
    }
}

/// Algorithm: greedy per-element state sweep with strict-improvement
/// acceptance.
///
/// Rejected candidates are reverted before the next one is applied (the
/// reversion consumes a control command but no measurement step). With
/// dynamic weights the running maximum keeps values computed under older
/// weights; that is deliberate and can make acceptance conservative.
pub fn greedy_optimize<E: Evaluator>(
    evaluator: &mut E,
    policy: WeightPolicy,
    settings: &OptimizerSettings,
    n_elements: usize,
) -> Result<(RisConfiguration, OptimizationTrace), OptimizeError> {
    settings.validate()?;
    if n_elements < 1 {
        return Err(OptimizeError::Settings("n_elements must be >= 1".into()));
    }

    let mut cfg = RisConfiguration::linear(n_elements, settings.n_state);
    let step_ms_before = evaluator.sim_time_ms();

    let baseline_meas = evaluator.initial().map_err(OptimizeError::InitialMeasurement)?;
    let frozen_weights = compute_weights(policy, &baseline_meas)?;
    let baseline_rsrp = rsrps(&baseline_meas);
    let mut ws_max = weighted_objective(settings.objective_domain, &frozen_weights, &baseline_rsrp)?;
    let baseline = TraceBaseline {
        per_ue_rsrp_dbm: baseline_rsrp,
        weights: frozen_weights.weights.clone(),
        rsrp_ws: ws_max,
    };

    let mut order: Vec<usize> = (0..n_elements).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(settings.element_order_seed));

    let mut rows: Vec<TraceRow> = Vec::with_capacity(
        settings.sweeps as usize * n_elements * settings.n_state as usize,
    );
    let mut iteration: u32 = 0;

    for _sweep in 0..settings.sweeps {
        for &element in &order {
            let mut best_state = cfg.states[element];
            for candidate in 0..settings.n_state {
                iteration += 1;
                cfg.states[element] = candidate;
                let meas = match evaluator.evaluate(&cfg) {
                    Ok(m) => m,
                    Err(source) => {
                        return Err(OptimizeError::Aborted {
                            iteration,
                            source,
                            partial: Box::new(OptimizationTrace {
                                baseline,
                                rows,
                                step_ms: step_delta(step_ms_before, evaluator.sim_time_ms(), &[]),
                            }),
                        });
                    }
                };
                let weights = if settings.recompute_weights {
                    compute_weights(policy, &meas)?
                } else {
                    frozen_weights.clone()
                };
                let rsrp = rsrps(&meas);
                let rsrp_ws = weighted_objective(settings.objective_domain, &weights, &rsrp)?;
                let accepted = rsrp_ws > ws_max;
                rows.push(TraceRow {
                    iteration,
                    element: element as u32,
                    candidate_state: candidate,
                    per_ue_rsrp_dbm: rsrp,
                    per_ue_cqi: meas.iter().map(|s| s.cqi).collect(),
                    weights: weights.weights,
                    rsrp_ws,
                    accepted,
                    sim_time_ms: evaluator.sim_time_ms(),
                });
                if accepted {
                    ws_max = rsrp_ws;
                    best_state = candidate;
                } else if cfg.states[element] != best_state {
                    cfg.states[element] = best_state;
                    if let Err(source) = evaluator.sync(&cfg) {
                        return Err(OptimizeError::Aborted {
                            iteration,
                            source,
                            partial: Box::new(OptimizationTrace {
                                baseline,
                                rows,
                                step_ms: step_delta(step_ms_before, evaluator.sim_time_ms(), &[]),
                            }),
                        });
                    }
                }
            }
        }
    }

    let step_ms = step_delta(step_ms_before, evaluator.sim_time_ms(), &rows);
    Ok((cfg, OptimizationTrace { baseline, rows, step_ms }))
}

fn step_delta(t0: u64, t1: u64, rows: &[TraceRow]) -> u64 {
    if rows.is_empty() {
        t1 - t0
    } else {
        (t1 - t0) / rows.len() as u64
    }
}

fn rsrps(meas: &[UeServiceState]) -> Vec<f64> {
    meas.iter().map(|s| s.last_rsrp_dbm).collect()
}

/// Oracle: evaluates every configuration with weights frozen at their initial
/// values; ties go to the lexicographically smallest state vector.
pub fn exhaustive_optimize<E: Evaluator>(
    evaluator: &mut E,
    policy: WeightPolicy,
    n_elements: usize,
    n_state: u8,
    domain: ObjectiveDomain,
) -> Result<(RisConfiguration, f64), OptimizeError> {
    if n_elements < 1 || n_state < 2 {
        return Err(OptimizeError::Settings(
            "n_elements must be >= 1 and n_state >= 2".into(),
        ));
    }
    let space = (n_state as u128)
        .checked_pow(n_elements as u32)
        .unwrap_or(u128::MAX);
    if space > EXHAUSTIVE_GUARD {
        return Err(OptimizeError::SearchSpaceTooLarge { space, guard: EXHAUSTIVE_GUARD });
    }

    let baseline = evaluator.initial().map_err(OptimizeError::InitialMeasurement)?;
    let weights = compute_weights(policy, &baseline)?;

    let mut cfg = RisConfiguration::linear(n_elements, n_state);
    let mut best: Option<(Vec<u8>, f64)> = None;
    loop {
        let meas = evaluator
            .evaluate(&cfg)
            .map_err(|source| OptimizeError::Aborted {
                iteration: 0,
                source,
                partial: Box::new(OptimizationTrace {
                    baseline: TraceBaseline {
                        per_ue_rsrp_dbm: rsrps(&baseline),
                        weights: weights.weights.clone(),
                        rsrp_ws: 0.0,
                    },
                    rows: vec![],
                    step_ms: 0,
                }),
            })?;
        let ws = weighted_objective(domain, &weights, &rsrps(&meas))?;
        // Strict improvement plus lexicographic enumeration order keeps the
        // lexicographically smallest argmax on ties.
        if best.as_ref().map_or(true, |(_, b)| ws > *b) {
            best = Some((cfg.states.clone(), ws));
        }
        if !advance_lexicographic(&mut cfg.states, n_state) {
            break;
        }
    }

    let (states, ws) = best.expect("at least one configuration evaluated");
    cfg.states = states;
    Ok((cfg, ws))
}

/// Odometer increment over state vectors; most-significant digit first so the
/// enumeration is lexicographic. Returns false after the last vector.
fn advance_lexicographic(states: &mut [u8], n_state: u8) -> bool {
    for s in states.iter_mut().rev() {
        if *s + 1 < n_state {
            *s += 1;
            return true;
        }
        *s = 0;
    }
    false
}

/// Best objective over `trials` uniformly random configurations, with weights
/// frozen at their initial values.
pub fn random_baseline<E: Evaluator>(
    evaluator: &mut E,
    n_elements: usize,
    n_state: u8,
    trials: u32,
    rng: &mut ChaCha8Rng,
) -> Result<f64, OptimizeError> {
    if trials < 1 {
        return Err(OptimizeError::Settings("trials must be >= 1".into()));
    }
    let baseline = evaluator.initial().map_err(OptimizeError::InitialMeasurement)?;
    let weights = compute_weights(WeightPolicy::Equal, &baseline)?;

    let mut cfg = RisConfiguration::linear(n_elements, n_state);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        for s in cfg.states.iter_mut() {
            *s = rng.random_range(0..n_state);
        }
        let meas = evaluator.evaluate(&cfg).map_err(|source| OptimizeError::Aborted {
            iteration: 0,
            source,
            partial: Box::new(OptimizationTrace {
                baseline: TraceBaseline {
                    per_ue_rsrp_dbm: vec![],
                    weights: vec![],
                    rsrp_ws: 0.0,
                },
                rows: vec![],
                step_ms: 0,
            }),
        })?;
        let ws = weighted_objective(ObjectiveDomain::Db, &weights, &rsrps(&meas))?;
        if ws > best {
            best = ws;
        }
    }
    Ok(best)
}

/// Evaluator that measures the channel directly, bypassing the RIC loop.
///
/// Holds the currently applied configuration, per-UE service history and a
/// private measurement RNG; each `evaluate` advances a logical clock by one
/// control step.
#[derive(Debug)]
pub struct DirectEvaluator {
    channel: ChannelRealization,
    meas: MeasurementConfig,
    service: ServiceModel,
    applied: RisConfiguration,
    history: Vec<Option<UeServiceState>>,
    rng: ChaCha8Rng,
    clock_ms: u64,
    step_ms: u64,
}

impl DirectEvaluator {
    pub fn new(
        channel: ChannelRealization,
        meas: MeasurementConfig,
        service: ServiceModel,
        initial: RisConfiguration,
        step_ms: u64,
        rng_seed: u64,
    ) -> Self {
        let n_ues = channel.n_ues();
        Self {
            channel,
            meas,
            service,
            applied: initial,
            history: vec![None; n_ues],
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            clock_ms: 0,
            step_ms,
        }
    }

    fn measure_all(&mut self) -> Result<Vec<UeServiceState>, EvalError> {
        let mut out = Vec::with_capacity(self.channel.n_ues());
        for ue in 0..self.channel.n_ues() {
            let rsrp =
                measure_ss_rsrp(&self.channel, &self.applied, ue, &self.meas, &mut self.rng)?;
            let state = self.service.observe(self.history[ue].as_ref(), rsrp)?;
            self.history[ue] = Some(state.clone());
            out.push(state);
        }
        Ok(out)
    }
}

impl Evaluator for DirectEvaluator {
    fn initial(&mut self) -> Result<Vec<UeServiceState>, EvalError> {
        self.measure_all()
    }

    fn evaluate(&mut self, cfg: &RisConfiguration) -> Result<Vec<UeServiceState>, EvalError> {
        self.applied = cfg.clone();
        self.clock_ms += self.step_ms;
        self.measure_all()
    }

    fn sync(&mut self, cfg: &RisConfiguration) -> Result<(), EvalError> {
        self.applied = cfg.clone();
        Ok(())
    }

    fn sim_time_ms(&self) -> u64 {
        self.clock_ms
    }
}
