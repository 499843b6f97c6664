//! Command-line front end: reads a JSON config, runs one experiment and writes
//! a CSV table plus a JSON manifest of the resolved inputs.

pub mod config;
pub mod output;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use log::{info, warn};
use optomech::experiments::{
    evaluate_point, optimal_gain, optimal_gain_vs_temperature, sweep_gain, sweep_ratios, sweep_theta,
};
use optomech::{Derived, Params, Record};
use serde::Serialize;

pub use clap;
pub use config::{parse_config, ConfigError, DetuningMode, ModelChoice, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Steady-state entanglement of an optomechanical cavity with an intracavity OPA")]
pub struct Cli {
    /// JSON config file; omitted keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path. The manifest is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Closed form for the intracavity amplitude.
    #[arg(long, value_enum, global = true)]
    pub model: Option<ModelChoice>,
    /// Whether the configured detunings are bare or already shifted.
    #[arg(long, value_enum, global = true)]
    pub detunings: Option<DetuningMode>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate the configured point.
    Point,
    /// Sweep the OPA phase θ at the configured gain.
    SweepTheta,
    /// Sweep the OPA gain at the configured phase.
    SweepGain,
    /// Squeezing ratios over the gain grid.
    SweepRatios,
    /// Optimal gain at the configured temperature.
    OptimalGain,
    /// Optimal gain over the temperature grid.
    GainVsTemperature,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Point => "point",
            Command::SweepTheta => "sweep-theta",
            Command::SweepGain => "sweep-gain",
            Command::SweepRatios => "sweep-ratios",
            Command::OptimalGain => "optimal-gain",
            Command::GainVsTemperature => "gain-vs-temperature",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numerical(#[from] optomech::Error),
}

impl RunError {
    /// 1 for bad input or unwritable output, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(optomech::Error::InvalidParameter { .. } | optomech::Error::InvalidGrid(_)) => 1,
            RunError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub sweep_value: f64,
    pub error: String,
}

/// A computed table, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub csv: Vec<u8>,
    pub axis: &'static str,
    pub values: Vec<f64>,
    pub unstable: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
    pub unstable: usize,
    pub failures: Vec<Failure>,
}

impl Outcome {
    /// Points that failed numerically make the run exit with 2, even though
    /// complete files were written.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    version: &'static str,
    csv: String,
    amplitude_model: ModelChoice,
    detuning_mode: DetuningMode,
    fixed_point_damping: f64,
    opa_gain_in_kappa: f64,
    params: &'a Params,
    derived: &'a Derived,
    sweep_axis: &'static str,
    sweep_values: &'a [f64],
    rows: usize,
    unstable_rows: usize,
    failures: &'a [Failure],
}

pub fn run(cli: &Cli) -> Result<Outcome, RunError> {
    let (text, origin) = match &cli.config {
        Some(path) => (
            fs::read_to_string(path).map_err(|source| RunError::ReadConfig {
                path: path.clone(),
                source,
            })?,
            path.display().to_string(),
        ),
        None => (String::new(), "<defaults>".to_string()),
    };
    let overrides = Overrides {
        model: cli.model,
        detunings: cli.detunings,
    };
    let cfg = parse_config(&text, overrides).map_err(|source| RunError::Config { path: origin, source })?;

    let csv = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    info!(
        "{}: κ = {:e} rad/s, G = {}κ, θ = {} rad, T = {} K",
        cli.command.name(),
        cfg.kappa(),
        cfg.opa_gain_in_kappa,
        cfg.params.opa_phase,
        cfg.params.temperature
    );

    let table = execute(cli.command, &cfg)?;
    for f in &table.failures {
        warn!("{} = {}: {}", table.axis, f.sweep_value, f.error);
    }

    let manifest = Manifest {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        csv: csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        amplitude_model: cfg.model,
        detuning_mode: cfg.detuning_mode,
        fixed_point_damping: cfg.settings.fixed_point.damping,
        opa_gain_in_kappa: cfg.opa_gain_in_kappa,
        params: &cfg.params,
        derived: &cfg.derived,
        sweep_axis: table.axis,
        sweep_values: &table.values,
        rows: table.values.len(),
        unstable_rows: table.unstable,
        failures: &table.failures,
    };
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');

    let manifest_path = output::manifest_path(&csv);
    let write = |path: &PathBuf, bytes: &[u8]| {
        output::write_atomic(path, bytes).map_err(|source| RunError::Write {
            path: path.clone(),
            source,
        })
    };
    write(&csv, &table.csv)?;
    write(&manifest_path, &manifest_bytes)?;

    Ok(Outcome {
        csv,
        manifest: manifest_path,
        rows: table.values.len(),
        unstable: table.unstable,
        failures: table.failures,
    })
}

/// Runs one subcommand and renders its CSV.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Table, RunError> {
    let s = &cfg.settings;
    match command {
        Command::Point => {
            let g = cfg.opa_gain_in_kappa;
            Ok(sweep_table("opa_gain_in_kappa", vec![g], vec![evaluate_point(&cfg.params, s)]))
        }
        Command::SweepTheta => {
            let grid = cfg.grids.theta_rad.clone();
            let records = sweep_theta(&cfg.params, &grid, s)?;
            Ok(sweep_table("opa_phase_rad", grid, records))
        }
        Command::SweepGain | Command::SweepRatios => {
            let grid = cfg.grids.gain_in_kappa.clone();
            let records = if command == Command::SweepGain {
                sweep_gain(&cfg.params, &cfg.gains(), s)?
            } else {
                sweep_ratios(&cfg.params, &cfg.gains(), s)?
            };
            Ok(sweep_table("opa_gain_in_kappa", grid, records))
        }
        Command::OptimalGain => {
            let t = cfg.params.temperature;
            let r = optimal_gain(&cfg.params, cfg.gain_bounds(), s)?;
            let rows = [output::optimal_gain_row(t, Some(&r))];
            Ok(Table {
                csv: output::csv_bytes(output::OPTIMAL_GAIN_HEADER, &rows).expect("in-memory CSV"),
                axis: "temperature_k",
                values: vec![t],
                unstable: 0,
                failures: Vec::new(),
            })
        }
        Command::GainVsTemperature => {
            let scan = optimal_gain_vs_temperature(&cfg.params, &cfg.grids.temperature_k, cfg.gain_bounds(), s)?;
            let rows: Vec<_> = scan
                .points
                .iter()
                .map(|(t, r)| output::optimal_gain_row(*t, r.as_ref().ok()))
                .collect();
            let failures = scan
                .points
                .iter()
                .filter_map(|(t, r)| {
                    r.as_ref().err().map(|e| Failure {
                        sweep_value: *t,
                        error: e.to_string(),
                    })
                })
                .collect();
            Ok(Table {
                csv: output::csv_bytes(output::OPTIMAL_GAIN_HEADER, &rows).expect("in-memory CSV"),
                axis: "temperature_k",
                values: cfg.grids.temperature_k.clone(),
                unstable: 0,
                failures,
            })
        }
    }
}

fn sweep_table(axis: &'static str, values: Vec<f64>, records: Vec<Record>) -> Table {
    let rows: Vec<_> = values.iter().zip(&records).map(|(x, r)| output::sweep_row(*x, r)).collect();
    let failures = values
        .iter()
        .zip(&records)
        .filter_map(|(x, r)| {
            r.failure.as_ref().map(|e| Failure {
                sweep_value: *x,
                error: e.clone(),
            })
        })
        .collect();
    Table {
        csv: output::csv_bytes(output::SWEEP_HEADER, &rows).expect("in-memory CSV"),
        axis,
        unstable: records.iter().filter(|r| !r.stable && r.failure.is_none()).count(),
        values,
        failures,
    }
}
