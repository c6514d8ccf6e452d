//! Near-RT RIC emulation.
//!
//! A minimal ordered pub/sub bus stands in for the inter-xApp message queue.
//! The channel-monitoring xApp publishes one KPM report per UE per control
//! step; the RIS-optimization xApp consumes them through an epoch-tagged
//! [`crate::optimizer::Evaluator`] so a measurement is only ever matched to
//! the configuration that was in force when it was taken. The clock is
//! logical: each evaluation advances simulated time by exactly one control
//! step (10 ms by default) and wall-clock time is decoupled.

mod bus;
mod wire;
mod xapp;

pub use bus::{
    BusMessage, ElementSelector, KpmReport, MessageBus, Payload, RisControlCommand, StateValue,
    Subscription, SubscriptionNotice, KPM_TOPIC, RIS_CTL_TOPIC, SUBSCRIPTION_TOPIC,
};
pub use wire::{decode_line, encode_line, pump_subscription, read_lines};
pub use xapp::{ro_xapp_run, CmXapp, RicEvaluator, RicRunParams, RicSimulation, RoRunOutput, SimWorld};

use crate::channel::ChannelError;
use crate::optimizer::OptimizeError;
use crate::policy::PolicyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RicError {
    #[error("unknown topic '{0}'")]
    UnknownTopic(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("wire format: {0}")]
    Wire(String),
}
