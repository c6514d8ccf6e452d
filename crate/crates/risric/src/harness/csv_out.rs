//! CSV emission and parse-back.
//!
//! `emit_csv` writes `trace.csv` (one row per UE per iteration) and
//! `trials.csv` (per-trial before/after); `emit_summary` writes
//! `summary.csv`. Floats are written in Rust's shortest round-trip form, so
//! parsing a file back reproduces the in-memory values bit-exactly and
//! re-running with the same scenario yields byte-identical files.

use super::campaign::CampaignResult;
use super::HarnessError;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::path::Path;

/// One `trace.csv` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCsvRow {
    pub trial: u32,
    pub iteration: u32,
    pub sim_time_ms: u64,
    pub element: u32,
    pub candidate_state: u8,
    pub accepted: bool,
    pub rsrp_ws: f64,
    pub ue_id: u32,
    pub rsrp_dbm: f64,
    pub weight: f64,
    pub cqi: u8,
}

/// One `trials.csv` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialsCsvRow {
    pub case: String,
    pub trial: u32,
    pub ue_id: u32,
    pub initial_dbm: f64,
    pub final_dbm: f64,
    pub improvement_db: f64,
}

/// One `summary.csv` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCsvRow {
    pub case: String,
    pub ue_id: u32,
    pub mean_initial_dbm: f64,
    pub mean_final_dbm: f64,
    pub mean_improvement_db: f64,
    pub std_db: f64,
    pub trials: u32,
}

/// Writes `trace.csv` and `trials.csv` into `dir`.
pub fn emit_csv(result: &CampaignResult, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;

    let mut trace_writer = csv::Writer::from_path(dir.join("trace.csv"))?;
    if let Some(traces) = &result.traces {
        for (trial_result, trace) in result.trial_results.iter().zip(traces) {
            for row in &trace.rows {
                for ue in 0..result.n_ue {
                    trace_writer.serialize(TraceCsvRow {
                        trial: trial_result.trial,
                        iteration: row.iteration,
                        sim_time_ms: row.sim_time_ms,
                        element: row.element,
                        candidate_state: row.candidate_state,
                        accepted: row.accepted,
                        rsrp_ws: row.rsrp_ws,
                        ue_id: ue as u32,
                        rsrp_dbm: row.per_ue_rsrp_dbm[ue],
                        weight: row.weights[ue],
                        cqi: row.per_ue_cqi[ue],
                    })?;
                }
            }
        }
    }
    // Header-only file when there is nothing to write.
    if result.traces.as_ref().map_or(true, |t| t.is_empty()) {
        trace_writer.write_record([
            "trial",
            "iteration",
            "sim_time_ms",
            "element",
            "candidate_state",
            "accepted",
            "rsrp_ws",
            "ue_id",
            "rsrp_dbm",
            "weight",
            "cqi",
        ])?;
    }
    trace_writer.flush()?;

    let mut trials_writer = csv::Writer::from_path(dir.join("trials.csv"))?;
    for t in &result.trial_results {
        let improvements = t.improvement_db();
        for ue in 0..result.n_ue {
            trials_writer.serialize(TrialsCsvRow {
                case: result.case.clone(),
                trial: t.trial,
                ue_id: ue as u32,
                initial_dbm: t.initial_dbm[ue],
                final_dbm: t.final_dbm[ue],
                improvement_db: improvements[ue],
            })?;
        }
    }
    if result.trial_results.is_empty() {
        trials_writer.write_record([
            "case",
            "trial",
            "ue_id",
            "initial_dbm",
            "final_dbm",
            "improvement_db",
        ])?;
    }
    trials_writer.flush()?;
    Ok(())
}

/// Writes `summary.csv` into `dir`.
pub fn emit_summary(result: &CampaignResult, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    let mut writer = csv::Writer::from_path(dir.join("summary.csv"))?;
    if !result.trial_results.is_empty() {
        for s in result.summaries() {
            writer.serialize(SummaryCsvRow {
                case: result.case.clone(),
                ue_id: s.ue_id,
                mean_initial_dbm: s.mean_initial_dbm,
                mean_final_dbm: s.mean_final_dbm,
                mean_improvement_db: s.mean_improvement_db,
                std_db: s.std_improvement_db,
                trials: s.trials,
            })?;
        }
    }
    if result.trial_results.is_empty() {
        writer.write_record([
            "case",
            "ue_id",
            "mean_initial_dbm",
            "mean_final_dbm",
            "mean_improvement_db",
            "std_db",
            "trials",
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceCsvRow>, HarnessError> {
    read_csv(path)
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialsCsvRow>, HarnessError> {
    read_csv(path)
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryCsvRow>, HarnessError> {
    read_csv(path)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut reader = csv::Reader::from_reader(File::open(path)?);
    reader.deserialize().collect::<Result<Vec<T>, _>>().map_err(HarnessError::from)
}

#[cfg(test)]
mod tests {
    use super::super::campaign::run_campaign;
    use super::super::scenario::ScenarioConfig;
    use super::*;
    use crate::channel::MeasurementConfig;
    use crate::policy::WeightPolicy;
    use approx::assert_relative_eq;
    use tempfile::tempdir;

    fn scenario(trials: u32) -> ScenarioConfig {
        ScenarioConfig {
            case: "csv-test".into(),
            n_x: 3,
            n_y: 2,
            n_state: 4,
            n_ue: 2,
            path_gain_db: vec![0.0, -4.0],
            noise_var: 0.0,
            noise_floor_dbm: -120.0,
            h_los: None,
            policy: WeightPolicy::Equal,
            trials,
            seed: 23,
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
    fn empty_result_writes_header_only_files() {
        let dir = tempdir().unwrap();
        let empty = CampaignResult::empty("empty", 2);
        emit_csv(&empty, dir.path()).unwrap();
        emit_summary(&empty, dir.path()).unwrap();
        for name in ["trace.csv", "trials.csv", "summary.csv"] {
            let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
            assert_eq!(text.lines().count(), 1, "{name}: {text}");
        }
        assert!(read_trace_csv(&dir.path().join("trace.csv")).unwrap().is_empty());
    }

    #[test]
    fn trace_row_count_matches_schema_arithmetic() {
        let sc = scenario(3);
        let result = run_campaign(&sc).unwrap();
        let dir = tempdir().unwrap();
        emit_csv(&result, dir.path()).unwrap();
        let rows = read_trace_csv(&dir.path().join("trace.csv")).unwrap();
        // trials * sweeps * N * n_state * n_ue
        assert_eq!(rows.len(), 3 * 1 * 6 * 4 * 2);
    }

    #[test]
    fn parse_back_reproduces_aggregates_exactly() {
        let sc = scenario(4);
        let result = run_campaign(&sc).unwrap();
        let dir = tempdir().unwrap();
        emit_csv(&result, dir.path()).unwrap();
        emit_summary(&result, dir.path()).unwrap();

        let trials = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
        let summary = read_summary_csv(&dir.path().join("summary.csv")).unwrap();
        for s in &summary {
            let ue_rows: Vec<&TrialsCsvRow> =
                trials.iter().filter(|r| r.ue_id == s.ue_id).collect();
            assert_eq!(ue_rows.len(), 4);
            let mean_imp: f64 =
                ue_rows.iter().map(|r| r.improvement_db).sum::<f64>() / ue_rows.len() as f64;
            assert_relative_eq!(mean_imp, s.mean_improvement_db, epsilon = 1e-9);
            let mean_init: f64 =
                ue_rows.iter().map(|r| r.initial_dbm).sum::<f64>() / ue_rows.len() as f64;
            assert_relative_eq!(mean_init, s.mean_initial_dbm, epsilon = 1e-9);
        }

        // The final RSRP in trials.csv equals the last accepted measurement in
        // trace.csv for every trial and UE.
        let trace = read_trace_csv(&dir.path().join("trace.csv")).unwrap();
        for t in &trials {
            let last_accepted = trace
                .iter()
                .filter(|r| r.trial == t.trial && r.ue_id == t.ue_id && r.accepted)
                .last();
            if let Some(row) = last_accepted {
                assert_relative_eq!(row.rsrp_dbm, t.final_dbm, epsilon = 1e-12);
            } else {
                assert_relative_eq!(t.improvement_db, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn identical_scenarios_emit_byte_identical_files() {
        let sc = scenario(2);
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        for dir in [&dir_a, &dir_b] {
            let result = run_campaign(&sc).unwrap();
            emit_csv(&result, dir.path()).unwrap();
            emit_summary(&result, dir.path()).unwrap();
        }
        for name in ["trace.csv", "trials.csv", "summary.csv"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs");
        }
    }
}
