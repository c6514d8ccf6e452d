//! Command-line front end: run campaigns, calibrate scenarios, compare the
//! greedy search against the exhaustive oracle and list the built-in cases.

use clap::{Parser, Subcommand};
use risric::harness::{
    builtin_cases, calibrate, emit_csv, emit_summary, find_case, run_campaign, run_oracle,
    CampaignResult, ScenarioConfig,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable overriding the scenario seed.
const SEED_ENV: &str = "RISRIC_SEED";

#[derive(Parser)]
#[command(name = "risric", version, about = "RIS-assisted 5G downlink simulator driven by RIC xApps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate a scenario and run its full campaign, writing CSVs.
    Run {
        /// Scenario file path, or a built-in case name (see `cases`).
        #[arg(long)]
        config: String,
        /// Output directory for trace.csv, trials.csv and summary.csv.
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's trial count.
        #[arg(long)]
        trials: Option<u32>,
        /// Override the scenario's seed (highest precedence).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare greedy, exhaustive and random search on one small instance.
    Oracle {
        #[arg(long)]
        config: String,
        /// Trial index selecting the channel draw.
        #[arg(long, default_value_t = 0)]
        trial: u32,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Calibrate a scenario and print (or write) the calibrated file.
    Calibrate {
        #[arg(long)]
        config: String,
        /// Write the calibrated scenario here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in case presets.
    Cases {
        /// Emit the named preset as a scenario file to stdout.
        #[arg(long)]
        emit: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // One machine-readable line on stderr.
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.kind, "message": e.message })
            );
            ExitCode::from(1)
        }
    }
}

struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        Self { kind, message: message.to_string() }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out, trials, seed } => cmd_run(&config, &out, trials, seed),
        Command::Oracle { config, trial, seed } => cmd_oracle(&config, trial, seed),
        Command::Calibrate { config, out } => cmd_calibrate(&config, out.as_deref()),
        Command::Cases { emit } => cmd_cases(emit.as_deref()),
    }
}

/// Loads a scenario from a file path or a built-in case name and applies the
/// seed overrides: --seed beats RISRIC_SEED beats the scenario file.
fn load_scenario(config: &str, cli_seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let path = Path::new(config);
    let mut scenario = if path.exists() {
        ScenarioConfig::from_file(path).map_err(|e| CliError::new("scenario", e))?
    } else if let Some(preset) = find_case(config) {
        preset
    } else {
        return Err(CliError::new(
            "scenario",
            format!("'{config}' is neither a readable file nor a built-in case"),
        ));
    };

    if let Ok(env_seed) = std::env::var(SEED_ENV) {
        scenario.seed = env_seed
            .parse()
            .map_err(|_| CliError::new("seed", format!("{SEED_ENV}='{env_seed}' is not a u64")))?;
    }
    if let Some(seed) = cli_seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn cmd_run(
    config: &str,
    out: &Path,
    trials: Option<u32>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut scenario = load_scenario(config, seed)?;
    if let Some(t) = trials {
        scenario.trials = t;
    }
    let scenario = calibrate(&scenario).map_err(|e| CliError::new("calibration", e))?;
    println!(
        "calibrated '{}': dbfs_to_dbm_offset = {:.3} dB, {} trials, seed {}",
        scenario.case, scenario.meas.dbfs_to_dbm_offset, scenario.trials, scenario.seed
    );

    let result = match run_campaign(&scenario) {
        Ok(result) => result,
        Err(e) => {
            // Flush whatever completed before the failing trial.
            flush(&e.partial, out)?;
            return Err(CliError::new("campaign", e));
        }
    };
    flush(&result, out)?;

    for s in result.summaries() {
        println!(
            "{} ue{}: initial {:.2} dBm -> final {:.2} dBm, improvement {:.2} dB (std {:.2}, n={})",
            result.case,
            s.ue_id,
            s.mean_initial_dbm,
            s.mean_final_dbm,
            s.mean_improvement_db,
            s.std_improvement_db,
            s.trials
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn flush(result: &CampaignResult, out: &Path) -> Result<(), CliError> {
    emit_csv(result, out).map_err(|e| CliError::new("io", e))?;
    emit_summary(result, out).map_err(|e| CliError::new("io", e))?;
    Ok(())
}

fn cmd_oracle(config: &str, trial: u32, seed: Option<u64>) -> Result<(), CliError> {
    let scenario = load_scenario(config, seed)?;
    let report = run_oracle(&scenario, trial).map_err(|e| CliError::new("oracle", e))?;
    println!(
        "N={} n_state={}: greedy {:.3} dBm, exhaustive {:.3} dBm, gap {:.3} dB",
        report.n_elements, report.n_state, report.greedy_objective, report.exhaustive_objective,
        report.gap_db
    );
    println!(
        "random best-of-{}: {:.3} dBm",
        report.random_trials, report.random_best_objective
    );
    println!("greedy states:     {:?}", report.greedy_states);
    println!("exhaustive states: {:?}", report.exhaustive_states);
    Ok(())
}

fn cmd_calibrate(config: &str, out: Option<&Path>) -> Result<(), CliError> {
    let scenario = load_scenario(config, None)?;
    let calibrated = calibrate(&scenario).map_err(|e| CliError::new("calibration", e))?;
    let text = calibrated.to_toml_string().map_err(|e| CliError::new("scenario", e))?;
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::new("io", e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_cases(emit: Option<&str>) -> Result<(), CliError> {
    match emit {
        Some(name) => {
            let scenario = find_case(name)
                .ok_or_else(|| CliError::new("scenario", format!("unknown case '{name}'")))?;
            let text = scenario.to_toml_string().map_err(|e| CliError::new("scenario", e))?;
            print!("{text}");
        }
        None => {
            for preset in builtin_cases() {
                println!(
                    "{}  {} UE(s), policy {:?}: {}",
                    preset.name,
                    preset.scenario.n_ue,
                    preset.scenario.policy,
                    preset.description
                );
            }
        }
    }
    Ok(())
}
