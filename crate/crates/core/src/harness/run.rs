use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitialDistribution, InitialSpec};
use super::observers::{InvariantObserver, SentinelObserver};
use super::trace::TraceRecorder;
use super::HarnessError;
use crate::adversaries::{build_named, ScheduleMetadata};
use crate::central::{k_gossip_centralized, n_broadcast, CentralError, StageLog};
use crate::net::{Engine, NodeId, Round, RunOptions, TokenState};
use crate::protocols::ProtocolName;

pub const CSV_HEADER: &str = "n,seed,adversary,protocol,completion_round,sentinel_round,wall_time_ms";

/// Schedules of free length are built this far; later rounds repeat the
/// last snapshot unless the adversary params say otherwise.
pub const DEFAULT_HORIZON_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub n: usize,
    pub seed: u64,
    /// `None` on timeout.
    pub completion_round: Option<Round>,
    /// Outer `None` when the schedule defines no sentinels, inner `None`
    /// when no sentinel reached a target.
    pub sentinel_round: Option<Option<Round>>,
    pub rounds_executed: Round,
    pub wall_time_ms: u128,
    pub stage_logs: Vec<StageLog>,
    pub invariant_violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub n: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub config_hash: String,
    pub cells: Vec<CellResult>,
    pub errors: Vec<CellError>,
}

impl ExperimentOutput {
    pub fn csv(&self, config: &ExperimentConfig) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let adversary = config.adversary.name.as_str();
        let protocol = config.protocol.name.to_string();
        for c in &self.cells {
            let completion = c.completion_round.map_or("TIMEOUT".to_string(), |r| r.to_string());
            let sentinel = match c.sentinel_round {
                None => String::new(),
                Some(None) => "TIMEOUT".to_string(),
                Some(Some(r)) => r.to_string(),
            };
            writeln!(
                out,
                "{},{},{adversary},{protocol},{completion},{sentinel},{}",
                c.n, c.seed, c.wall_time_ms
            )
            .unwrap();
        }
        out
    }
}

fn initial_state(config: &ExperimentConfig, n: usize, meta: &ScheduleMetadata) -> Result<TokenState, HarnessError> {
    let k = config.k.unwrap_or(n);
    match &config.initial {
        InitialSpec::SingleSource => Ok(TokenState::single_source(n, k, meta.source.unwrap_or(NodeId(0)))),
        InitialSpec::OneTokenPerNode => Ok(TokenState::one_token_per_node(n, k)),
        InitialSpec::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let dist: InitialDistribution = serde_json::from_str(&text)?;
            if dist.holdings.len() != n {
                return Err(HarnessError::Config(format!(
                    "{} describes {} nodes, run has {n}",
                    path.display(),
                    dist.holdings.len()
                )));
            }
            dist.to_state()
        }
    }
}

fn central_outcome(result: Result<Vec<StageLog>, CentralError>) -> Result<Vec<StageLog>, HarnessError> {
    match result {
        Ok(logs) => Ok(logs),
        Err(e) if e.is_round_limit() => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

/// One `(n, seed)` run.
pub fn run_cell(config: &ExperimentConfig, n: usize, seed: u64) -> Result<CellResult, HarnessError> {
    let start = Instant::now();
    let horizon = config.max_rounds.min(DEFAULT_HORIZON_CAP);
    let generated = build_named(
        config.adversary.name,
        n,
        config.adversary.seed.wrapping_add(seed),
        &config.adversary.params,
        horizon,
    )?;
    let schedule = generated.schedule;
    let initial = initial_state(config, n, &schedule.metadata)?;
    let mut options = RunOptions::new(config.max_rounds, seed);
    if config.check_invariants {
        options = options.validating();
    }

    let mut sentinel = SentinelObserver::new(&schedule.metadata, n);
    let mut invariants = InvariantObserver::new();
    let mut recorder = TraceRecorder::new();
    let mut logs = Vec::new();
    let result = {
        let mut engine = Engine::new(&schedule, initial, options)?;
        if let Some(s) = sentinel.as_mut() {
            engine.observe(s);
        }
        if config.check_invariants {
            engine.observe(&mut invariants);
        }
        if config.outputs.trace_dir.is_some() {
            engine.observe(&mut recorder);
        }
        match &config.protocol.name {
            ProtocolName::CentralBroadcast => {
                let params = config.protocol.central_params()?;
                let scope = engine.tracked().clone();
                let source = (0..n as u32)
                    .map(NodeId)
                    .find(|&v| engine.state().holdings(v).is_superset(&scope))
                    .ok_or_else(|| HarnessError::Config("central-broadcast needs a node holding every token".into()))?;
                logs = central_outcome(n_broadcast(&mut engine, source, &scope, &params))?;
            }
            ProtocolName::CentralKGossip => {
                let params = config.protocol.central_params()?;
                logs = central_outcome(k_gossip_centralized(&mut engine, &params))?;
            }
            name => {
                let mut protocol = name.distributed().expect("distributed protocol");
                engine.run(protocol.as_mut())?;
            }
        }
        engine.result()
    };

    if let Some(dir) = &config.outputs.trace_dir {
        std::fs::create_dir_all(dir)?;
        let stem = format!("n{n}_seed{seed}");
        recorder.trace.write(&dir.join(format!("{stem}.gtr")))?;
        std::fs::write(
            dir.join(format!("{stem}.meta.json")),
            serde_json::to_string_pretty(&schedule.metadata)?,
        )?;
    }
    Ok(CellResult {
        n,
        seed,
        completion_round: result.completion_round,
        sentinel_round: sentinel.map(|s| s.first_round()),
        rounds_executed: result.rounds_executed,
        wall_time_ms: start.elapsed().as_millis(),
        stage_logs: logs,
        invariant_violations: invariants.violations,
    })
}

/// Worker count from `GOSSIPSIM_WORKERS`; `None` leaves the choice to rayon.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("GOSSIPSIM_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
}

/// Runs every `(n, seed)` cell, in parallel, and collects results in
/// config order. Failed cells are reported in `errors`; timeouts are not
/// failures.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    let cells: Vec<(usize, u64)> = config
        .n
        .iter()
        .flat_map(|&n| config.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers_from_env() {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| HarnessError::Config(e.to_string()))?;
    let results: Vec<Result<CellResult, HarnessError>> =
        pool.install(|| cells.par_iter().map(|&(n, seed)| run_cell(config, n, seed)).collect());

    let mut output = ExperimentOutput {
        config_hash: config.content_hash(),
        cells: Vec::new(),
        errors: Vec::new(),
    };
    for ((n, seed), r) in cells.into_iter().zip(results) {
        match r {
            Ok(cell) => output.cells.push(cell),
            Err(e) => output.errors.push(CellError {
                n,
                seed,
                message: e.to_string(),
            }),
        }
    }
    Ok(output)
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    config_hash: &'a str,
    config: &'a ExperimentConfig,
    errors: &'a [CellError],
    stage_logs: Vec<(usize, u64, &'a [StageLog])>,
}

/// Writes the CSV and a `<csv>.meta.json` sidecar with the config hash.
pub fn write_results(config: &ExperimentConfig, output: &ExperimentOutput, csv: &Path) -> Result<(), HarnessError> {
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(csv, output.csv(config))?;
    let meta = RunMetadata {
        config_hash: &output.config_hash,
        config,
        errors: &output.errors,
        stage_logs: output
            .cells
            .iter()
            .filter(|c| !c.stage_logs.is_empty())
            .map(|c| (c.n, c.seed, c.stage_logs.as_slice()))
            .collect(),
    };
    let mut sidecar = csv.as_os_str().to_owned();
    sidecar.push(".meta.json");
    std::fs::write(sidecar, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// The CSV without the wall-time column, for determinism checks.
pub fn data_columns(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(data, _)| data))
        .collect::<Vec<_>>()
        .join("\n")
}
