//! Experiment harness: scenario files, calibration, campaigns and CSV output.

mod calibrate;
mod campaign;
mod csv_out;
mod oracle;
mod presets;
mod scenario;

pub use calibrate::{calibrate, mean_unoptimized_rsrp, CALIBRATION_TARGET_DBM, CALIBRATION_TOLERANCE_DB};
pub use campaign::{run_campaign, run_trial, CampaignError, CampaignResult, TrialResult, UeSummary};
pub use csv_out::{
    emit_csv, emit_summary, read_summary_csv, read_trace_csv, read_trials_csv, SummaryCsvRow,
    TraceCsvRow, TrialsCsvRow,
};
pub use oracle::{run_oracle, OracleReport};
pub use presets::{builtin_cases, find_case, CasePreset};
pub use scenario::{Polarization, ScenarioConfig};

use crate::channel::ChannelError;
use crate::optimizer::OptimizeError;
use crate::policy::PolicyError;
use crate::ric::RicError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("scenario file parse error: {0}")]
    Parse(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Ric(#[from] RicError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// RNG stream tags; distinct per use so streams never collide.
pub(crate) mod streams {
    pub const CHANNEL: u64 = 1;
    pub const MEASUREMENT: u64 = 2;
    pub const ELEMENT_ORDER: u64 = 3;
    pub const CAL_CHANNEL: u64 = 4;
    pub const CAL_MEASUREMENT: u64 = 5;
    pub const RANDOM_BASELINE: u64 = 6;
}
