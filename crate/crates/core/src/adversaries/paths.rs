//! Paths-respecting adversaries: every node pair owns a set of
//! vertex-disjoint infrastructure paths, and in any round at most
//! `paths - 1` edges of that set may be missing.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{schedule_rng, AdversaryError, ScheduleMetadata};
use crate::net::{AdversarySchedule, Mode, NetworkSnapshot, NodeId, Round};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub source: NodeId,
    pub dest: NodeId,
    /// Each path lists its nodes from `source` to `dest`.
    pub paths: Vec<Vec<NodeId>>,
}

impl PathSystem {
    pub fn budget(&self) -> usize {
        self.paths.len().saturating_sub(1)
    }

    fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
    }

    fn check(&self, infrastructure: &NetworkSnapshot) -> Result<(), String> {
        if self.paths.is_empty() {
            return Err("no paths".into());
        }
        let mut interior = HashSet::new();
        for (i, path) in self.paths.iter().enumerate() {
            if path.first() != Some(&self.source) || path.last() != Some(&self.dest) || path.len() < 2 {
                return Err(format!("path {i} does not run from {} to {}", self.source, self.dest));
            }
            let mut seen = HashSet::new();
            if !path.iter().all(|v| seen.insert(*v)) {
                return Err(format!("path {i} is not simple"));
            }
            for &v in &path[1..path.len() - 1] {
                if !interior.insert(v) {
                    return Err(format!("node {v} is shared by two paths"));
                }
            }
            if let Some(w) = path.windows(2).find(|w| !infrastructure.has_edge(w[0], w[1])) {
                return Err(format!("edge ({}, {}) of path {i} is not in the infrastructure", w[0], w[1]));
            }
        }
        let mut direct = 0;
        for path in &self.paths {
            direct += usize::from(path.len() == 2);
        }
        if direct > 1 {
            return Err("the direct edge appears twice".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathViolation {
    pub system: usize,
    pub round: Round,
    pub inactive: usize,
    pub budget: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathsReport {
    pub rounds_checked: usize,
    pub systems_checked: usize,
    /// Largest inactive-edge count seen in any (system, round).
    pub max_inactive: usize,
    pub first_violation: Option<PathViolation>,
}

impl PathsReport {
    pub fn accepted(&self) -> bool {
        self.first_violation.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PathsError {
    #[error("round {round}: edge ({}, {}) is not in the infrastructure", .edge.0, .edge.1)]
    EdgeOutsideInfrastructure { round: Round, edge: (NodeId, NodeId) },
    #[error("path system {index}: {reason}")]
    BadSystem { index: usize, reason: String },
}

/// Counts, for every round and system, the system's path edges missing from
/// that round's snapshot. Rounds sharing a snapshot are evaluated once.
pub fn validate_paths_respecting(
    schedule: &AdversarySchedule,
    infrastructure: &NetworkSnapshot,
    systems: &[PathSystem],
) -> Result<PathsReport, PathsError> {
    for (index, system) in systems.iter().enumerate() {
        system.check(infrastructure).map_err(|reason| PathsError::BadSystem { index, reason })?;
    }
    let mut report = PathsReport {
        rounds_checked: schedule.horizon(),
        systems_checked: systems.len(),
        ..Default::default()
    };
    let mut cache: HashMap<*const NetworkSnapshot, Option<(usize, usize)>> = HashMap::new();
    for (i, snap) in schedule.snapshots.iter().enumerate() {
        let round = i as Round + 1;
        let key = Arc::as_ptr(snap);
        let outcome = match cache.get(&key) {
            Some(&outcome) => outcome,
            None => {
                if let Some(&edge) = snap.edges().iter().find(|&&(a, b)| !infrastructure.has_edge(a, b)) {
                    return Err(PathsError::EdgeOutsideInfrastructure { round, edge });
                }
                let mut outcome = None;
                for (index, system) in systems.iter().enumerate() {
                    let inactive = system.edges().filter(|&(a, b)| !snap.has_edge(a, b)).count();
                    report.max_inactive = report.max_inactive.max(inactive);
                    if inactive > system.budget() && outcome.is_none() {
                        outcome = Some((index, inactive));
                    }
                }
                cache.insert(key, outcome);
                outcome
            }
        };
        if let (Some((system, inactive)), None) = (outcome, &report.first_violation) {
            report.first_violation = Some(PathViolation {
                system,
                round,
                inactive,
                budget: systems[system].budget(),
            });
        }
    }
    Ok(report)
}

/// A paths-respecting schedule with the infrastructure and path systems it
/// respects.
#[derive(Clone, Debug)]
pub struct PathsRespecting {
    pub schedule: AdversarySchedule,
    pub infrastructure: NetworkSnapshot,
    pub systems: Vec<PathSystem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingPolicy {
    RoundRobin,
    Random,
    FixedEdge,
}

impl std::str::FromStr for RingPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "round-robin" => Ok(RingPolicy::RoundRobin),
            "random" => Ok(RingPolicy::Random),
            "fixed-edge" => Ok(RingPolicy::FixedEdge),
            other => Err(format!("unknown ring policy `{other}`")),
        }
    }
}

impl RingPolicy {
    fn as_str(self) -> &'static str {
        match self {
            RingPolicy::RoundRobin => "round-robin",
            RingPolicy::Random => "random",
            RingPolicy::FixedEdge => "fixed-edge",
        }
    }
}

/// Ring of `n` nodes; each round edge `(e, e+1 mod n)` is down, where `e`
/// follows `policy`. Pair systems are the two arcs of the ring.
pub fn build_ring_failure(
    n: usize,
    policy: RingPolicy,
    seed: u64,
    horizon: usize,
) -> Result<PathsRespecting, AdversaryError> {
    if n < 3 {
        return Err(AdversaryError::Unsupported {
            n,
            reason: "a ring needs at least 3 nodes".into(),
        });
    }
    let ring = |e: usize| {
        let kept = (0..n).filter(|&u| u != e).map(|u| (NodeId(u as u32), NodeId(((u + 1) % n) as u32)));
        Arc::new(NetworkSnapshot::from_edge_set(n, kept))
    };
    let variants: Vec<Arc<NetworkSnapshot>> = (0..n).map(ring).collect();
    let mut rng = schedule_rng(seed, 3);
    let fixed = rng.gen_range(0..n);
    let snapshots = (1..=horizon)
        .map(|t| {
            let e = match policy {
                RingPolicy::RoundRobin => t % n,
                RingPolicy::Random => rng.gen_range(0..n),
                RingPolicy::FixedEdge => fixed,
            };
            variants[e].clone()
        })
        .collect();

    let mut systems = Vec::with_capacity(n * (n - 1) / 2);
    for s in 0..n {
        for d in s + 1..n {
            let forward = (s..=d).map(|v| NodeId(v as u32)).collect();
            let backward = (0..=(n - d + s))
                .map(|step| NodeId(((s + n - step) % n) as u32))
                .collect();
            systems.push(PathSystem {
                source: NodeId(s as u32),
                dest: NodeId(d as u32),
                paths: vec![forward, backward],
            });
        }
    }
    let mut meta = ScheduleMetadata::new("ring-failure", n, seed).param("policy", policy.as_str());
    if policy == RingPolicy::FixedEdge {
        meta = meta.param("failed_edge", fixed);
    }
    let schedule = AdversarySchedule::new(n, snapshots, Vec::new(), Mode::Oblivious, meta)?;
    Ok(PathsRespecting {
        schedule,
        infrastructure: NetworkSnapshot::cycle(n),
        systems,
    })
}

/// Nodes `0..r` are centers joined to every other node; the rest are
/// terminals. Each round `floor((r-2)/2)` consecutive centers, starting at a
/// seeded offset that advances by one per round, lose their terminal edges.
pub fn build_center_terminal(n: usize, r: usize, seed: u64, horizon: usize) -> Result<PathsRespecting, AdversaryError> {
    if r < 3 || r + 1 > n {
        return Err(AdversaryError::InvalidParam(format!("need 3 <= r <= n - 1, got r = {r}, n = {n}")));
    }
    let node = |v: usize| NodeId(v as u32);
    let disabled_count = (r - 2) / 2;
    let infra_edges: Vec<(NodeId, NodeId)> = (0..r)
        .flat_map(|c| (c + 1..n).map(move |v| (node(c), node(v))))
        .collect();
    let infrastructure = NetworkSnapshot::from_edge_set(n, infra_edges.iter().copied());

    let offset0 = schedule_rng(seed, 4).gen_range(0..r);
    let variants: Vec<Arc<NetworkSnapshot>> = (0..r)
        .map(|offset| {
            let disabled: Vec<usize> = (0..disabled_count).map(|q| (offset + q) % r).collect();
            let kept = infra_edges
                .iter()
                .copied()
                .filter(|&(c, v)| !(v.index() >= r && disabled.contains(&c.index())));
            Arc::new(NetworkSnapshot::from_edge_set(n, kept))
        })
        .collect();
    let snapshots = (1..=horizon).map(|t| variants[(offset0 + t) % r].clone()).collect();

    let mut systems = Vec::with_capacity(n * (n - 1) / 2);
    for s in 0..n {
        for d in s + 1..n {
            let paths: Vec<Vec<NodeId>> = if s >= r {
                (0..r - 1).map(|c| vec![node(s), node(c), node(d)]).collect()
            } else {
                std::iter::once(vec![node(s), node(d)])
                    .chain(
                        (0..r)
                            .filter(|&c| c != s && c != d)
                            .take(r - 2)
                            .map(|c| vec![node(s), node(c), node(d)]),
                    )
                    .collect()
            };
            systems.push(PathSystem {
                source: node(s),
                dest: node(d),
                paths,
            });
        }
    }
    let meta = ScheduleMetadata::new("center-terminal", n, seed)
        .param("r", r)
        .param("disabled_centers", disabled_count)
        .param("rotation_offset", offset0);
    let schedule = AdversarySchedule::new(n, snapshots, Vec::new(), Mode::Oblivious, meta)?;
    Ok(PathsRespecting {
        schedule,
        infrastructure,
        systems,
    })
}
