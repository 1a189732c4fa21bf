//! Scenario-driven command line for the optical Josephson junction
//! simulator.
//!
//! Usage: `ojj <protocol|interference|ring|bragg|sweep> --config <path>
//! [--out <dir>] [--emit-plots]`, or `ojj selftest`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical integrity
//! failure.

mod config;
mod runners;
mod svg;
mod table;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use runners::{RunError, ScenarioOutput};

#[derive(Parser)]
#[command(
    name = "ojj",
    about = "Exact two-mode simulator of an optical Josephson junction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Twin-Fock pulse protocol: delta_n versus pulse phase.
    Protocol(RunArgs),
    /// Hold-time fringe intensity with collapse/revival detection.
    Interference(RunArgs),
    /// Full trap+ring model and the adiabatic-elimination report.
    Ring(RunArgs),
    /// Three-level Bragg ladder dynamics and scans.
    Bragg(RunArgs),
    /// Run one scenario repeatedly over a list of parameter values.
    Sweep(RunArgs),
    /// Run the full invariant suite; nonzero exit on any failure.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir; default ".").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG line plots.
    #[arg(long)]
    emit_plots: bool,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_INTEGRITY: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (expected_kind, args) = match &cli.command {
        Command::Protocol(a) => ("protocol", a),
        Command::Interference(a) => ("interference", a),
        Command::Ring(a) => ("ring", a),
        Command::Bragg(a) => ("bragg", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Selftest => return run_selftest(),
    };
    match run_scenario_command(expected_kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunError::Integrity(msg)) => {
            eprintln!("error: numerical integrity failure: {msg}");
            ExitCode::from(EXIT_INTEGRITY)
        }
    }
}

fn run_selftest() -> ExitCode {
    let checks = runners::run_selftest();
    let mut all_passed = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {} - {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    if all_passed {
        println!("selftest: {} checks passed", checks.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("selftest: invariant failures detected");
        ExitCode::from(EXIT_INTEGRITY)
    }
}

fn run_scenario_command(expected_kind: &str, args: &RunArgs) -> Result<(), RunError> {
    let raw = fs::read_to_string(&args.config).map_err(|e| {
        RunError::Config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let cfg = config::parse(&raw).map_err(RunError::Config)?;
    if cfg.kind.name() != expected_kind {
        return Err(RunError::Config(format!(
            "config kind \"{}\" does not match subcommand \"{expected_kind}\"",
            cfg.kind.name()
        )));
    }

    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .map_err(|e| RunError::Config(format!("cannot create {}: {e}", out_dir.display())))?;

    let output = runners::run_kind(&cfg.kind)?;
    write_artifacts(&cfg, &output, &out_dir, args.emit_plots || cfg.emit_plots)
        .map_err(|e| RunError::Config(format!("cannot write artifacts: {e}")))?;

    if let Some(breach) = output.integrity.breach() {
        return Err(RunError::Integrity(breach));
    }
    Ok(())
}

fn write_artifacts(
    cfg: &config::ScenarioConfig,
    output: &ScenarioOutput,
    out_dir: &Path,
    emit_plots: bool,
) -> std::io::Result<()> {
    for (stem, table) in &output.tables {
        table.write_csv(&out_dir.join(format!("{stem}.csv")))?;
    }

    let wall_clock = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let mut parameters = cfg.raw.clone();
    if let Some(obj) = parameters.as_object_mut() {
        for common in ["schema_version", "kind", "output_dir", "emit_plots"] {
            obj.remove(common);
        }
    }
    let summary = json!({
        "scenario": cfg.kind.name(),
        "parameters": parameters,
        "results": output.results,
        "integrity": output.integrity.to_json(),
        "provenance": {
            "config": cfg.raw,
            "artifact_version": env!("CARGO_PKG_VERSION"),
            "wall_clock_utc_seconds": wall_clock,
        },
    });
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).expect("summary is serializable") + "\n",
    )?;

    if emit_plots {
        for plot in &output.plots {
            svg::write(plot, out_dir)?;
        }
    }
    Ok(())
}
