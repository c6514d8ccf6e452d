//! In-process ordered pub/sub message bus.
//!
//! Topics must be registered before use. Publishing stamps a per-topic
//! strictly increasing sequence number and delivers to every subscriber
//! queue; delivery is at-least-once and preserves per-topic order, and
//! nothing is lost in-process.

use super::RicError;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

pub const KPM_TOPIC: &str = "kpm";
pub const RIS_CTL_TOPIC: &str = "ris-ctl";
pub const SUBSCRIPTION_TOPIC: &str = "subscriptions";

/// One timestamped per-UE measurement record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpmReport {
    pub sim_time_ms: u64,
    pub ue_id: u32,
    pub ss_rsrp_dbm: f64,
    pub cqi: u8,
    pub dl_throughput_bps: f64,
    pub tbs_bits: u64,
    /// Epoch of the RIS configuration in force when this was measured.
    pub config_epoch: u64,
}

/// Which elements a control command addresses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementSelector {
    All,
    Index(u32),
}

/// New state payload: one value for a single element, or the full vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateValue {
    Single(u8),
    Vector(Vec<u8>),
}

/// RIS reconfiguration command; epochs strictly increase per applied command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RisControlCommand {
    pub sim_time_ms: u64,
    pub config_epoch: u64,
    pub element: ElementSelector,
    pub state: StateValue,
}

/// Announcement that an xApp attached to a topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubscriptionNotice {
    pub topic: String,
    pub subscriber: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    Kpm(KpmReport),
    RisControl(RisControlCommand),
    Subscription(SubscriptionNotice),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusMessage {
    pub topic: String,
    pub seq: u64,
    pub payload: Payload,
}

type Queue = Arc<Mutex<VecDeque<BusMessage>>>;

struct TopicState {
    next_seq: u64,
    subscribers: Vec<Queue>,
}

/// Cloneable handle to the shared bus.
#[derive(Clone)]
pub struct MessageBus {
    inner: Arc<Mutex<HashMap<String, TopicState>>>,
}

impl Default for MessageBus {
    fn default() -> Self {
        Self::new()
    }
}

impl MessageBus {
    /// Bus with the three standard topics already registered.
    pub fn new() -> Self {
        let bus = Self { inner: Arc::new(Mutex::new(HashMap::new())) };
        for topic in [KPM_TOPIC, RIS_CTL_TOPIC, SUBSCRIPTION_TOPIC] {
            bus.register_topic(topic);
        }
        bus
    }

    /// Registers a topic; idempotent.
    pub fn register_topic(&self, topic: &str) {
        self.inner
            .lock()
            .expect("bus lock")
            .entry(topic.to_string())
            .or_insert_with(|| TopicState { next_seq: 0, subscribers: Vec::new() });
    }

    /// Publishes a payload, returning the assigned per-topic sequence number.
    pub fn publish(&self, topic: &str, payload: Payload) -> Result<u64, RicError> {
        let mut inner = self.inner.lock().expect("bus lock");
        let state = inner
            .get_mut(topic)
            .ok_or_else(|| RicError::UnknownTopic(topic.to_string()))?;
        let seq = state.next_seq;
        state.next_seq += 1;
        let msg = BusMessage { topic: topic.to_string(), seq, payload };
        for sub in &state.subscribers {
            sub.lock().expect("subscriber lock").push_back(msg.clone());
        }
        Ok(seq)
    }

    /// Attaches a new subscriber queue to a topic.
    pub fn subscribe(&self, topic: &str) -> Result<Subscription, RicError> {
        let mut inner = self.inner.lock().expect("bus lock");
        let state = inner
            .get_mut(topic)
            .ok_or_else(|| RicError::UnknownTopic(topic.to_string()))?;
        let queue: Queue = Arc::new(Mutex::new(VecDeque::new()));
        state.subscribers.push(queue.clone());
        Ok(Subscription { queue })
    }
}

/// Ordered stream of messages for one subscriber.
pub struct Subscription {
    queue: Queue,
}

impl Subscription {
    pub fn try_next(&self) -> Option<BusMessage> {
        self.queue.lock().expect("subscriber lock").pop_front()
    }

    pub fn drain(&self) -> Vec<BusMessage> {
        let mut q = self.queue.lock().expect("subscriber lock");
        q.drain(..).collect()
    }

    pub fn len(&self) -> usize {
        self.queue.lock().expect("subscriber lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
