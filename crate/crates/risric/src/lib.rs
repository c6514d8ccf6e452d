//! Closed-loop simulator of a RIS-assisted multi-user 5G downlink.
//!
//! A software-controlled Reconfigurable Intelligent Surface (RIS) sits between
//! a gNB and a set of UEs whose direct path is blocked. An emulated near-RT RIC
//! hosts two xApps: a channel-monitoring xApp that publishes periodic per-UE
//! KPM reports (SS-RSRP, CQI, throughput, TBS) on a message bus, and a
//! RIS-optimization xApp that greedily sweeps per-element discrete phase states
//! to maximize a weighted sum of the UE SS-RSRP values under an operator
//! weight policy (equal, proportional-fair, best-CQI, or single reference UE).
//!
//! Module map:
//! - [`channel`]: stochastic channel realizations, effective RIS channel,
//!   sample-based received power and SS-RSRP measurement model.
//! - [`policy`]: per-UE weights for the three operator policies plus the
//!   CQI/TBS/throughput service-state proxies they consume.
//! - [`optimizer`]: the greedy per-element state search, an exhaustive oracle
//!   and a random baseline, all behind an [`optimizer::Evaluator`] interface.
//! - [`ric`]: ordered pub/sub bus, the two xApps, epoch-tagged causality and
//!   the lockstep 10 ms control clock; optional newline-delimited socket
//!   transport.
//! - [`harness`]: scenario files, calibration, multi-trial campaigns, CSV
//!   emission and the built-in case presets behind the CLI.

pub mod channel;
pub mod harness;
pub mod optimizer;
pub mod policy;
pub mod ric;

mod seed;

pub use seed::derive_seed;
