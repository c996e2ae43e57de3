use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{
    build_blocker_line_invasive, build_blocker_line_oblivious, build_center_terminal, build_random_interval_connected,
    build_ring_failure, build_skb_adversary, build_static, AdversaryError, BlockerLineParams, PathsRespecting,
    RingPolicy, SkbAdversaryParams, StaticFamily,
};
use crate::net::{dgs, AdversarySchedule, NetworkSnapshot, TailPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryName {
    BlockerInvasive,
    BlockerOblivious,
    Skb,
    RingFailure,
    CenterTerminal,
    Random,
    StaticLine,
    StaticCycle,
    StaticComplete,
    File,
}

impl AdversaryName {
    pub const ALL: [AdversaryName; 10] = [
        AdversaryName::BlockerInvasive,
        AdversaryName::BlockerOblivious,
        AdversaryName::Skb,
        AdversaryName::RingFailure,
        AdversaryName::CenterTerminal,
        AdversaryName::Random,
        AdversaryName::StaticLine,
        AdversaryName::StaticCycle,
        AdversaryName::StaticComplete,
        AdversaryName::File,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryName::BlockerInvasive => "blocker-invasive",
            AdversaryName::BlockerOblivious => "blocker-oblivious",
            AdversaryName::Skb => "skb",
            AdversaryName::RingFailure => "ring-failure",
            AdversaryName::CenterTerminal => "center-terminal",
            AdversaryName::Random => "random",
            AdversaryName::StaticLine => "static-line",
            AdversaryName::StaticCycle => "static-cycle",
            AdversaryName::StaticComplete => "static-complete",
            AdversaryName::File => "file",
        }
    }
}

impl std::fmt::Display for AdversaryName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AdversaryName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown adversary `{s}`"))
    }
}

/// Optional knobs; each generator reads the ones it understands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversaryParams {
    pub epsilon: Option<f64>,
    pub c_clique: Option<f64>,
    pub policy: Option<RingPolicy>,
    pub r: Option<usize>,
    pub extra_edge_prob: Option<f64>,
    pub horizon: Option<usize>,
    /// DGS1 file for the `file` adversary; a `<path>.meta.json` sidecar is
    /// loaded when present.
    pub path: Option<PathBuf>,
    /// Behavior past the horizon; defaults to repeating the last snapshot.
    pub tail: Option<TailPolicy>,
}

#[derive(Clone, Debug)]
pub struct GeneratedAdversary {
    pub schedule: AdversarySchedule,
    /// Infrastructure and path systems for paths-respecting generators.
    pub paths: Option<(NetworkSnapshot, Vec<super::PathSystem>)>,
}

/// Builds a named adversary for `n` nodes. `default_horizon` applies to
/// generators whose length is free (ring, center-terminal, random, static).
pub fn build_named(
    name: AdversaryName,
    n: usize,
    seed: u64,
    params: &AdversaryParams,
    default_horizon: usize,
) -> Result<GeneratedAdversary, AdversaryError> {
    let horizon = params.horizon.unwrap_or(default_horizon);
    let plain = |schedule| GeneratedAdversary { schedule, paths: None };
    let with_paths = |p: PathsRespecting| GeneratedAdversary {
        schedule: p.schedule,
        paths: Some((p.infrastructure, p.systems)),
    };
    let blocker = || {
        let mut p = BlockerLineParams::with_epsilon(n, params.epsilon.unwrap_or(1.0 / 32.0), seed);
        if let Some(c) = params.c_clique {
            p.c_clique = c;
        }
        p
    };
    let mut generated = match name {
        AdversaryName::BlockerInvasive => plain(build_blocker_line_invasive(&blocker())?),
        AdversaryName::BlockerOblivious => plain(build_blocker_line_oblivious(&blocker())?),
        AdversaryName::Skb => plain(build_skb_adversary(&SkbAdversaryParams::new(n, seed))?),
        AdversaryName::RingFailure => with_paths(build_ring_failure(
            n,
            params.policy.unwrap_or(RingPolicy::RoundRobin),
            seed,
            horizon,
        )?),
        AdversaryName::CenterTerminal => {
            let r = params.r.unwrap_or(6.min(n.saturating_sub(1)));
            with_paths(build_center_terminal(n, r, seed, horizon)?)
        }
        AdversaryName::Random => plain(build_random_interval_connected(
            n,
            params.extra_edge_prob.unwrap_or(0.0),
            seed,
            horizon,
        )?),
        AdversaryName::StaticLine => plain(build_static(StaticFamily::Line, n, horizon)?),
        AdversaryName::StaticCycle => plain(build_static(StaticFamily::Cycle, n, horizon)?),
        AdversaryName::StaticComplete => plain(build_static(StaticFamily::Complete, n, horizon)?),
        AdversaryName::File => {
            let path = params
                .path
                .as_ref()
                .ok_or_else(|| AdversaryError::InvalidParam("the file adversary needs `path`".into()))?;
            let schedule = dgs::read_schedule(path)
                .map_err(|e| AdversaryError::InvalidParam(format!("{}: {e}", path.display())))?;
            if schedule.n != n {
                return Err(AdversaryError::InvalidParam(format!(
                    "{} has {} nodes, expected {n}",
                    path.display(),
                    schedule.n
                )));
            }
            let mut schedule = schedule;
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".meta.json");
            if let Ok(text) = std::fs::read_to_string(&sidecar) {
                schedule.metadata = serde_json::from_str(&text)
                    .map_err(|e| AdversaryError::InvalidParam(format!("{}: {e}", sidecar.to_string_lossy())))?;
            }
            plain(schedule)
        }
    };
    generated.schedule.tail = params.tail.unwrap_or(TailPolicy::StaticTail);
    Ok(generated)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        for a in AdversaryName::ALL {
            assert_eq!(a.as_str().parse::<AdversaryName>().unwrap(), a);
        }
        assert!("nope".parse::<AdversaryName>().is_err());
    }

    #[test]
    fn unknown_params_are_rejected() {
        let err = serde_json::from_str::<AdversaryParams>(r#"{"epsilom": 0.1}"#);
        assert!(err.is_err());
        let p: AdversaryParams = serde_json::from_str(r#"{"policy": "random", "horizon": 7}"#).unwrap();
        assert_eq!(p.policy, Some(RingPolicy::Random));
        let g = build_named(AdversaryName::RingFailure, 5, 1, &p, 100).unwrap();
        assert_eq!(g.schedule.horizon(), 7);
        assert!(g.paths.is_some());
    }
}
