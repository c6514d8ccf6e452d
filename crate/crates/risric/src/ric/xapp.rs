//! The two xApps and the lockstep simulation kernel.
//!
//! The kernel owns the world (channel realization plus the RIS configuration
//! currently in force) and runs the channel-monitoring xApp once per control
//! step. The RIS-optimization xApp drives the greedy search through a
//! [`RicEvaluator`]: each evaluation publishes a control command, steps the
//! kernel by exactly `step_ms`, then waits for the full per-UE report set
//! carrying the new configuration epoch. Reports from older epochs (late
//! duplicates, at-least-once delivery) are skipped, never consumed.

use super::bus::{
    ElementSelector, KpmReport, MessageBus, Payload, RisControlCommand, StateValue, Subscription,
    SubscriptionNotice, KPM_TOPIC, RIS_CTL_TOPIC, SUBSCRIPTION_TOPIC,
};
use super::RicError;
use crate::channel::{measure_ss_rsrp, ChannelRealization, MeasurementConfig, RisConfiguration};
use crate::optimizer::{
    greedy_optimize, EvalError, Evaluator, OptimizationTrace, OptimizerSettings,
};
use crate::policy::{ServiceModel, UeServiceState, WeightPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Channel realization and the RIS configuration currently applied to it.
#[derive(Debug)]
pub struct SimWorld {
    pub channel: ChannelRealization,
    pub config: RisConfiguration,
    pub epoch: u64,
    pub clock_ms: u64,
}

impl SimWorld {
    pub fn new(channel: ChannelRealization, config: RisConfiguration) -> Result<Self, RicError> {
        if channel.n_elements() != config.n_elements() {
            return Err(RicError::Protocol(format!(
                "channel has {} elements, configuration {}",
                channel.n_elements(),
                config.n_elements()
            )));
        }
        Ok(Self { channel, config, epoch: 0, clock_ms: 0 })
    }

    /// Applies one control command; epochs must strictly increase.
    pub fn apply(&mut self, cmd: &RisControlCommand) -> Result<(), RicError> {
        if cmd.config_epoch <= self.epoch {
            return Err(RicError::Protocol(format!(
                "command epoch {} does not advance world epoch {}",
                cmd.config_epoch, self.epoch
            )));
        }
        match (&cmd.element, &cmd.state) {
            (ElementSelector::All, StateValue::Vector(v)) => {
                if v.len() != self.config.n_elements() {
                    return Err(RicError::Protocol(format!(
                        "full state vector has {} entries for {} elements",
                        v.len(),
                        self.config.n_elements()
                    )));
                }
                if let Some(s) = v.iter().find(|s| **s >= self.config.n_state) {
                    return Err(RicError::Protocol(format!(
                        "state {s} out of range for n_state {}",
                        self.config.n_state
                    )));
                }
                self.config.states.copy_from_slice(v);
            }
            (ElementSelector::Index(i), StateValue::Single(s)) => {
                let i = *i as usize;
                if i >= self.config.n_elements() {
                    return Err(RicError::Protocol(format!("element index {i} out of range")));
                }
                if *s >= self.config.n_state {
                    return Err(RicError::Protocol(format!(
                        "state {s} out of range for n_state {}",
                        self.config.n_state
                    )));
                }
                self.config.states[i] = *s;
            }
            (el, st) => {
                return Err(RicError::Protocol(format!(
                    "selector {el:?} incompatible with state payload {st:?}"
                )));
            }
        }
        self.epoch = cmd.config_epoch;
        Ok(())
    }
}

/// Channel-monitoring xApp: measures every UE and publishes KPM reports.
pub struct CmXapp {
    meas: MeasurementConfig,
    service: ServiceModel,
    history: Vec<Option<UeServiceState>>,
    rng: ChaCha8Rng,
}

impl CmXapp {
    pub fn new(meas: MeasurementConfig, service: ServiceModel, n_ue: usize, rng_seed: u64) -> Self {
        Self {
            meas,
            service,
            history: vec![None; n_ue],
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
        }
    }

    /// One monitoring step: measures SS-RSRP per UE under the configuration
    /// currently in force, derives CQI/TBS/throughput and publishes one report
    /// per UE stamped with the world's epoch.
    pub fn step(&mut self, world: &SimWorld, bus: &MessageBus) -> Result<(), RicError> {
        for ue in 0..self.history.len() {
            let rsrp = measure_ss_rsrp(&world.channel, &world.config, ue, &self.meas, &mut self.rng)?;
            let state = self.service.observe(self.history[ue].as_ref(), rsrp)?;
            bus.publish(
                KPM_TOPIC,
                Payload::Kpm(KpmReport {
                    sim_time_ms: world.clock_ms,
                    ue_id: ue as u32,
                    ss_rsrp_dbm: state.last_rsrp_dbm,
                    cqi: state.cqi,
                    dl_throughput_bps: state.throughput_ewma_bps,
                    tbs_bits: state.tbs_bits,
                    config_epoch: world.epoch,
                }),
            )?;
            self.history[ue] = Some(state);
        }
        Ok(())
    }

    pub fn n_ue(&self) -> usize {
        self.history.len()
    }
}

/// Lockstep kernel: applies pending control commands, advances the clock by
/// one control step and runs the monitoring xApp.
pub struct RicSimulation {
    pub bus: MessageBus,
    world: SimWorld,
    cm: CmXapp,
    ctl_sub: Subscription,
    step_ms: u64,
}

impl RicSimulation {
    pub fn new(
        bus: MessageBus,
        world: SimWorld,
        cm: CmXapp,
        step_ms: u64,
    ) -> Result<Self, RicError> {
        let ctl_sub = bus.subscribe(RIS_CTL_TOPIC)?;
        bus.publish(
            SUBSCRIPTION_TOPIC,
            Payload::Subscription(SubscriptionNotice {
                topic: RIS_CTL_TOPIC.to_string(),
                subscriber: "ric-kernel".to_string(),
            }),
        )?;
        Ok(Self { bus, world, cm, ctl_sub, step_ms })
    }

    /// Publishes the first report set at simulated time zero, epoch zero.
    pub fn activate(&mut self) -> Result<(), RicError> {
        self.cm.step(&self.world, &self.bus)
    }

    /// Applies queued control commands in publish order.
    pub fn apply_pending(&mut self) -> Result<(), RicError> {
        for msg in self.ctl_sub.drain() {
            match msg.payload {
                Payload::RisControl(cmd) => self.world.apply(&cmd)?,
                other => {
                    return Err(RicError::Protocol(format!(
                        "non-command payload on control topic: {other:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// One control step: apply commands, advance the clock, measure, report.
    pub fn step(&mut self) -> Result<(), RicError> {
        self.apply_pending()?;
        self.world.clock_ms += self.step_ms;
        self.cm.step(&self.world, &self.bus)
    }

    pub fn world(&self) -> &SimWorld {
        &self.world
    }

    pub fn step_ms(&self) -> u64 {
        self.step_ms
    }

    pub fn n_ue(&self) -> usize {
        self.cm.n_ue()
    }
}

/// RIS-optimization xApp measurement path: command out, report set in.
///
/// Keeps the epoch counter, skips stale reports and fails loudly when the
/// expected per-UE report set for an epoch is incomplete after a step (the
/// lockstep equivalent of a timeout).
pub struct RicEvaluator {
    sim: RicSimulation,
    kpm_sub: Subscription,
    next_epoch: u64,
    commands_issued: u64,
    stale_reports_skipped: u64,
    consumed_epoch_mismatches: u64,
}

impl RicEvaluator {
    pub fn new(sim: RicSimulation) -> Result<Self, RicError> {
        let kpm_sub = sim.bus.subscribe(KPM_TOPIC)?;
        sim.bus.publish(
            SUBSCRIPTION_TOPIC,
            Payload::Subscription(SubscriptionNotice {
                topic: KPM_TOPIC.to_string(),
                subscriber: "ro-xapp".to_string(),
            }),
        )?;
        Ok(Self {
            sim,
            kpm_sub,
            next_epoch: 0,
            commands_issued: 0,
            stale_reports_skipped: 0,
            consumed_epoch_mismatches: 0,
        })
    }

    /// Commands published so far (applications plus reversions).
    pub fn commands_issued(&self) -> u64 {
        self.commands_issued
    }

    /// Stale-epoch reports observed and skipped, never consumed.
    pub fn stale_reports_skipped(&self) -> u64 {
        self.stale_reports_skipped
    }

    /// Consumed reports whose epoch differed from the expected one; stays
    /// zero unless the causality contract is broken.
    pub fn consumed_epoch_mismatches(&self) -> u64 {
        self.consumed_epoch_mismatches
    }

    pub fn simulation(&self) -> &RicSimulation {
        &self.sim
    }

    /// Flushes trailing commands so the world matches the final configuration.
    pub fn finish(mut self) -> Result<RicSimulation, RicError> {
        self.sim.apply_pending()?;
        Ok(self.sim)
    }

    fn publish_full_config(&mut self, cfg: &RisConfiguration) -> Result<(), RicError> {
        self.next_epoch += 1;
        self.sim.bus.publish(
            RIS_CTL_TOPIC,
            Payload::RisControl(RisControlCommand {
                sim_time_ms: self.sim.world.clock_ms,
                config_epoch: self.next_epoch,
                element: ElementSelector::All,
                state: StateValue::Vector(cfg.states.clone()),
            }),
        )?;
        self.commands_issued += 1;
        Ok(())
    }

    /// Collects exactly one report per UE for the expected epoch.
    fn collect_report_set(&mut self) -> Result<Vec<UeServiceState>, RicError> {
        let n_ue = self.sim.n_ue();
        let expected = self.next_epoch;
        let mut per_ue: Vec<Option<KpmReport>> = vec![None; n_ue];
        for msg in self.kpm_sub.drain() {
            let report = match msg.payload {
                Payload::Kpm(r) => r,
                other => {
                    return Err(RicError::Protocol(format!(
                        "non-report payload on KPM topic: {other:?}"
                    )));
                }
            };
            if report.config_epoch < expected {
                // Late duplicate from an earlier epoch; causality forbids
                // evaluating the current command with it.
                self.stale_reports_skipped += 1;
                continue;
            }
            if report.config_epoch > expected {
                self.consumed_epoch_mismatches += 1;
                return Err(RicError::Protocol(format!(
                    "report from future epoch {} while waiting for {}",
                    report.config_epoch, expected
                )));
            }
            let slot = per_ue.get_mut(report.ue_id as usize).ok_or_else(|| {
                RicError::Protocol(format!("report for unknown UE {}", report.ue_id))
            })?;
            if slot.is_none() {
                *slot = Some(report);
            }
        }
        let missing: Vec<usize> = per_ue
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .map(|(ue, _)| ue)
            .collect();
        if !missing.is_empty() {
            return Err(RicError::Protocol(format!(
                "missing KPM reports for epoch {expected} after one control step: UEs {missing:?} \
                 (got {} of {} reports)",
                n_ue - missing.len(),
                n_ue
            )));
        }
        Ok(per_ue
            .into_iter()
            .map(|r| {
                let r = r.expect("checked above");
                UeServiceState {
                    cqi: r.cqi,
                    tbs_bits: r.tbs_bits,
                    throughput_ewma_bps: r.dl_throughput_bps,
                    last_rsrp_dbm: r.ss_rsrp_dbm,
                }
            })
            .collect())
    }
}

impl Evaluator for RicEvaluator {
    fn initial(&mut self) -> Result<Vec<UeServiceState>, EvalError> {
        self.sim.activate().map_err(|e| EvalError(e.to_string()))?;
        self.collect_report_set().map_err(|e| EvalError(e.to_string()))
    }

    fn evaluate(&mut self, cfg: &RisConfiguration) -> Result<Vec<UeServiceState>, EvalError> {
        self.publish_full_config(cfg).map_err(|e| EvalError(e.to_string()))?;
        self.sim.step().map_err(|e| EvalError(e.to_string()))?;
        self.collect_report_set().map_err(|e| EvalError(e.to_string()))
    }

    fn sync(&mut self, cfg: &RisConfiguration) -> Result<(), EvalError> {
        // Reversion: a control command without a measurement step.
        self.publish_full_config(cfg).map_err(|e| EvalError(e.to_string()))
    }

    fn sim_time_ms(&self) -> u64 {
        self.sim.world.clock_ms
    }
}

/// Everything needed to run the RIS-optimization xApp once.
pub struct RicRunParams {
    pub channel: ChannelRealization,
    pub initial_config: RisConfiguration,
    pub meas: MeasurementConfig,
    pub service: ServiceModel,
    pub policy: WeightPolicy,
    pub settings: OptimizerSettings,
    pub step_ms: u64,
    pub meas_rng_seed: u64,
}

/// Result of one full RO-xApp run.
pub struct RoRunOutput {
    pub config: RisConfiguration,
    pub trace: OptimizationTrace,
    pub elapsed_ms: u64,
    pub commands_issued: u64,
    pub stale_reports_skipped: u64,
    pub consumed_epoch_mismatches: u64,
}

/// Runs the full closed loop: CM xApp reporting, RO xApp optimizing.
///
/// The returned configuration carries the scenario's grid shape; its state
/// vector equals the optimizer's result, and the world is left in that
/// configuration.
pub fn ro_xapp_run(params: RicRunParams) -> Result<RoRunOutput, RicError> {
    let bus = MessageBus::new();
    let n_ue = params.channel.n_ues();
    let n_elements = params.channel.n_elements();
    let world = SimWorld::new(params.channel, params.initial_config)?;
    let cm = CmXapp::new(params.meas, params.service, n_ue, params.meas_rng_seed);
    let sim = RicSimulation::new(bus, world, cm, params.step_ms)?;
    let mut evaluator = RicEvaluator::new(sim)?;

    let (cfg, trace) =
        greedy_optimize(&mut evaluator, params.policy, &params.settings, n_elements)?;

    let commands_issued = evaluator.commands_issued();
    let stale_reports_skipped = evaluator.stale_reports_skipped();
    let consumed_epoch_mismatches = evaluator.consumed_epoch_mismatches();
    let elapsed_ms = evaluator.sim_time_ms();
    let sim = evaluator.finish()?;

    debug_assert_eq!(sim.world().config.states, cfg.states);
    let mut final_config = sim.world().config.clone();
    final_config.states = cfg.states;

    Ok(RoRunOutput {
        config: final_config,
        trace,
        elapsed_ms,
        commands_issued,
        stale_reports_skipped,
        consumed_epoch_mismatches,
    })
}
