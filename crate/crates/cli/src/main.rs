//! `siegel-lab`: machine-readable reports over Siegel domain instances.
//!
//! Every subcommand reads one JSON configuration, runs the corresponding
//! module, and emits a versioned JSON report (schema `siegel-lab/1`) to
//! stdout or `--out`. Exit codes: 0 on success, 1 for input or module
//! errors, 2 when the multiplicity-freeness criteria disagree (which the
//! underlying equivalence rules out, so 2 flags a bug or a quadrature
//! failure, never a property of the input).
//!
//! Invariants: identical configuration and seed produce byte-identical
//! reports apart from the `wall_time_ms` field; all randomness flows from
//! the single effective seed.

mod commands;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use siegel_core::SiegelConfig;

#[derive(Parser)]
#[command(name = "siegel-lab", version, about = "Reports over Siegel domains of the second kind")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the per-axis quadrature node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Override the configuration RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a configuration.
    Validate(Common),
    /// Randomized group-law identities: associativity, brackets, action.
    GroupCheck(Common),
    /// Classify the configured multiplier to its canonical parameter.
    ClassifyMultiplier(Common),
    /// Representation-model identities: homomorphisms and intertwiners.
    RepCheck(Common),
    /// Bergman kernel values at the configured points.
    Kernel(Common),
    /// Bergman metric blocks at the configured points.
    Metric(Common),
    /// Cross-checked multiplicity-freeness report for the real form.
    MfReport(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::GroupCheck(_) => "group-check",
            Command::ClassifyMultiplier(_) => "classify-multiplier",
            Command::RepCheck(_) => "rep-check",
            Command::Kernel(_) => "kernel",
            Command::Metric(_) => "metric",
            Command::MfReport(_) => "mf-report",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Validate(c)
            | Command::GroupCheck(c)
            | Command::ClassifyMultiplier(c)
            | Command::RepCheck(c)
            | Command::Kernel(c)
            | Command::Metric(c)
            | Command::MfReport(c) => c,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn execute(command: &Command) -> anyhow::Result<i32> {
    let common = command.common();
    let started = Instant::now();
    let text = std::fs::read_to_string(&common.config)
        .with_context(|| format!("reading {}", common.config.display()))?;
    let cfg = SiegelConfig::from_json(&text)?;
    let inputs = serde_json::to_value(&cfg)?;

    let norm = match cfg.validate() {
        Ok(norm) => norm,
        Err(violations) => {
            for v in &violations {
                eprintln!("invalid configuration at {v}");
            }
            let payload = json!({
                "valid": false,
                "violations": violations
                    .iter()
                    .map(|v| json!({"path": v.path, "message": v.message}))
                    .collect::<Vec<_>>(),
            });
            let report = envelope(command.name(), &inputs, &payload, None, None, started);
            emit(common, &report)?;
            return Ok(1);
        }
    };
    let nodes = common.nodes.unwrap_or(norm.nodes);
    let seed = common.seed.unwrap_or(norm.seed);

    let (payload, code) = match command {
        Command::Validate(_) => (commands::validate(&norm), 0),
        Command::GroupCheck(_) => commands::group_check(&norm, seed)?,
        Command::ClassifyMultiplier(_) => commands::classify_multiplier(&norm, seed)?,
        Command::RepCheck(_) => commands::rep_check(&norm, seed)?,
        Command::Kernel(_) => commands::kernel(&norm, nodes)?,
        Command::Metric(_) => commands::metric(&norm, nodes)?,
        Command::MfReport(_) => commands::mf_report(&norm, nodes, seed)?,
    };
    let report = envelope(command.name(), &inputs, &payload, Some(nodes), Some(seed), started);
    emit(common, &report)?;
    Ok(code)
}

fn envelope(
    command: &str,
    inputs: &Value,
    payload: &Value,
    nodes: Option<usize>,
    seed: Option<u64>,
    started: Instant,
) -> Value {
    json!({
        "schema": "siegel-lab/1",
        "command": command,
        "inputs": inputs,
        "nodes": nodes,
        "seed": seed,
        "report": payload,
        "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
    })
}

fn emit(common: &Common, report: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match &common.out {
        Some(path) => std::fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}
