// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use dkg_sim::log_io::LogFile;
use dkg_sim::scenario::{replay, run_scenario, Adversary, ScenarioConfig};
use dkg_sim::vectors::emit_vectors;

#[derive(Parser)]
#[command(name = "dkg-sim", version, about = "Deterministic DKG scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario end to end; report JSON goes to stdout, the event
    /// log to --out.
    Run {
        /// Number of participants n.
        #[arg(long)]
        nodes: u16,
        /// Threshold degree t (reconstruction needs t+1 shares).
        #[arg(long)]
        threshold: usize,
        /// Scenario seed; fixes all randomness.
        #[arg(long)]
        seed: u64,
        /// Adversary spec IDX:BEHAVIOR[:TARGET]; behaviors: bad-share,
        /// no-distribute, false-dispute. Repeatable.
        #[arg(long = "adversary", value_name = "SPEC")]
        adversaries: Vec<String>,
        /// Where to write the event-log JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay an event log against a fresh board and print the rebuilt
    /// report.
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
    /// Write the golden test vectors.
    Vectors {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            nodes,
            threshold,
            seed,
            adversaries,
            out,
        } => {
            let adversaries = adversaries
                .iter()
                .map(|spec| spec.parse::<Adversary>().map_err(anyhow::Error::msg))
                .collect::<Result<Vec<_>>>()
                .context("bad --adversary spec")?;
            let config = ScenarioConfig {
                n: nodes,
                t: threshold,
                seed,
                adversaries,
            };
            let mut outcome = run_scenario(&config)?;

            let log_json = serde_json::to_string_pretty(&outcome.log)?;
            fs::write(&out, log_json + "\n")
                .with_context(|| format!("writing event log to {}", out.display()))?;
            outcome.report.event_log = Some(out.display().to_string());

            println!("{}", outcome.report.to_json());
            Ok(if outcome.report.reconstruction_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Replay { log } => {
            let raw = fs::read_to_string(&log)
                .with_context(|| format!("reading event log {}", log.display()))?;
            let parsed: LogFile = serde_json::from_str(&raw).context("parsing event log JSON")?;
            let mut report = replay(&parsed)?;
            report.event_log = Some(log.display().to_string());
            println!("{}", report.to_json());
            // an unfinished log has no check to pass or fail
            Ok(match report.reconstruction_check.as_deref() {
                Some("failed") => ExitCode::FAILURE,
                _ => ExitCode::SUCCESS,
            })
        }
        Command::Vectors { out } => {
            let json = serde_json::to_string_pretty(&emit_vectors())?;
            fs::write(&out, json + "\n")
                .with_context(|| format!("writing vectors to {}", out.display()))?;
            println!("wrote vectors to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
