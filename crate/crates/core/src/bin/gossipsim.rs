use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gossipsim::adversaries::{build_named, AdversaryName, AdversaryParams, ScheduleMetadata};
use gossipsim::harness::{
    measure_blocker_separation, run_experiment, sweep, validate_files, write_generated, write_results,
    ExperimentConfig, HarnessError, Trace,
};

#[derive(Parser)]
#[command(name = "gossipsim", version, about = "Token dissemination experiments on adversarial dynamic networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an adversary schedule as DGS1 plus JSON sidecars.
    Gen {
        #[arg(long)]
        adversary: AdversaryName,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Rounds for generators of free length.
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        /// Adversary params as inline JSON.
        #[arg(long)]
        params: Option<String>,
    },
    /// Parse and check a DGS1 schedule, optionally against path systems.
    Validate {
        schedule: PathBuf,
        #[arg(long, requires = "paths")]
        infra: Option<PathBuf>,
        #[arg(long, requires = "infra")]
        paths: Option<PathBuf>,
    },
    /// Run every (n, seed) cell of a config and write the CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a config over several n and fit the scaling slope.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Blocker separation statistic of a recorded trace.
    Separation {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        meta: PathBuf,
    },
}

fn gen(
    adversary: AdversaryName,
    n: usize,
    seed: u64,
    out: &Path,
    horizon: usize,
    params: Option<&str>,
) -> Result<(), HarnessError> {
    let params: AdversaryParams = match params {
        Some(text) => serde_json::from_str(text)?,
        None => AdversaryParams::default(),
    };
    let generated = build_named(adversary, n, seed, &params, horizon)?;
    for path in write_generated(&generated, out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(command: Command) -> Result<bool, HarnessError> {
    match command {
        Command::Gen {
            adversary,
            n,
            seed,
            out,
            horizon,
            params,
        } => {
            gen(adversary, n, seed, &out, horizon, params.as_deref())?;
            Ok(true)
        }
        Command::Validate { schedule, infra, paths } => {
            let pair = infra.as_deref().zip(paths.as_deref());
            let report = validate_files(&schedule, pair)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.accepted())
        }
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?;
            let output = run_experiment(&config)?;
            let csv = config.outputs.csv.clone().expect("load sets a csv path");
            write_results(&config, &output, &csv)?;
            println!("{} runs written to {} (config {})", output.cells.len(), csv.display(), output.config_hash);
            for e in &output.errors {
                eprintln!("n={} seed={}: {}", e.n, e.seed, e.message);
            }
            Ok(output.errors.is_empty())
        }
        Command::Sweep { config } => {
            let config = ExperimentConfig::load(&config)?;
            let report = sweep(&config)?;
            print!("{}", report.summary.csv());
            println!("slope {:.3}", report.summary.slope.unwrap_or(f64::NAN));
            for e in &report.output.errors {
                eprintln!("n={} seed={}: {}", e.n, e.seed, e.message);
            }
            Ok(report.output.errors.is_empty())
        }
        Command::Separation { trace, meta } => {
            let trace = Trace::read(&trace)?;
            let meta: ScheduleMetadata = serde_json::from_str(&std::fs::read_to_string(&meta)?)?;
            let stats = measure_blocker_separation(&trace, &meta)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
            match stats.fraction() {
                Some(f) => println!("fraction below {:.3}: {f:.6}", stats.threshold),
                None => println!("no segment rounds in the trace"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
