use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use super::HarnessError;
use crate::adversaries::{validate_paths_respecting, GeneratedAdversary, PathSystem, PathsReport, ScheduleMetadata};
use crate::net::{dgs, AdversarySchedule, Mode, NetworkSnapshot};

/// `path` with `suffix` appended to its file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the schedule as DGS1 at `out` with its metadata at
/// `<out>.meta.json`; paths-respecting schedules also get the
/// infrastructure as a one-round DGS1 file at `<out>.infra.dgs` and the
/// path systems at `<out>.paths.json`. Returns the files written.
pub fn write_generated(generated: &GeneratedAdversary, out: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let schedule = &generated.schedule;
    dgs::write_schedule(schedule, out).map_err(|e| HarnessError::Config(e.to_string()))?;
    let meta = sidecar(out, ".meta.json");
    std::fs::write(&meta, serde_json::to_string_pretty(&schedule.metadata)?)?;
    let mut written = vec![out.to_path_buf(), meta];
    if let Some((infra, systems)) = &generated.paths {
        let infra_path = sidecar(out, ".infra.dgs");
        dgs::write_schedule(&infrastructure_schedule(infra)?, &infra_path)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let paths_path = sidecar(out, ".paths.json");
        std::fs::write(&paths_path, serde_json::to_string_pretty(systems)?)?;
        written.extend([infra_path, paths_path]);
    }
    Ok(written)
}

fn infrastructure_schedule(infra: &NetworkSnapshot) -> Result<AdversarySchedule, HarnessError> {
    let meta = ScheduleMetadata::new("infrastructure", infra.n(), 0);
    AdversarySchedule::new(infra.n(), vec![Arc::new(infra.clone())], Vec::new(), Mode::Oblivious, meta)
        .map_err(|e| HarnessError::Config(e.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub horizon: usize,
    pub mode: String,
    pub insertions: usize,
    pub paths: Option<PathsReport>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.paths.as_ref().is_none_or(PathsReport::accepted)
    }
}

/// Parses (and so connectivity-checks) a DGS1 schedule; with an
/// infrastructure file and path systems, also checks that the schedule is
/// paths-respecting.
pub fn validate_files(schedule: &Path, paths: Option<(&Path, &Path)>) -> Result<ValidationReport, HarnessError> {
    let parsed = dgs::read_schedule(schedule).map_err(|e| HarnessError::Config(format!("{}: {e}", schedule.display())))?;
    let mut report = ValidationReport {
        n: parsed.n,
        horizon: parsed.horizon(),
        mode: parsed.mode.as_str().to_string(),
        insertions: parsed.insertions.len(),
        paths: None,
    };
    if let Some((infra_path, systems_path)) = paths {
        let infra = dgs::read_schedule(infra_path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", infra_path.display())))?;
        let infra = infra
            .snapshots
            .first()
            .ok_or_else(|| HarnessError::Config("infrastructure file has no rounds".into()))?;
        let systems: Vec<PathSystem> = serde_json::from_str(&std::fs::read_to_string(systems_path)?)?;
        let paths_report = validate_paths_respecting(&parsed, infra, &systems)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        report.paths = Some(paths_report);
    }
    Ok(report)
}
