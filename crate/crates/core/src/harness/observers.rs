use std::collections::HashMap;

use crate::adversaries::ScheduleMetadata;
use crate::net::{validate_snapshot, Round, RoundObserver, RoundRecord, TokenState};

/// First round in which a sentinel token arrives at a target node.
///
/// Tokens arriving at a capture node set during its capture round become
/// blockers and stop counting as sentinels.
pub struct SentinelObserver {
    sentinel: Vec<bool>,
    target: Vec<bool>,
    captures: HashMap<Round, Vec<bool>>,
    first: Option<Round>,
}

impl SentinelObserver {
    /// `None` when the metadata defines no sentinels.
    pub fn new(meta: &ScheduleMetadata, n: usize) -> Option<Self> {
        if !meta.has_sentinels() {
            return None;
        }
        let mut target = vec![false; n];
        for v in &meta.target_nodes {
            target[v.index()] = true;
        }
        let universe = meta.sentinel_tokens.iter().map(|t| t.index() + 1).max().unwrap_or(0);
        let mut sentinel = vec![false; universe];
        for t in &meta.sentinel_tokens {
            sentinel[t.index()] = true;
        }
        let captures = meta
            .blocker_capture
            .iter()
            .map(|c| {
                let mut mask = vec![false; n];
                for v in &c.nodes {
                    mask[v.index()] = true;
                }
                (c.round, mask)
            })
            .collect();
        Some(SentinelObserver {
            sentinel,
            target,
            captures,
            first: None,
        })
    }

    pub fn first_round(&self) -> Option<Round> {
        self.first
    }

    fn is_sentinel(&self, token: crate::TokenId) -> bool {
        self.sentinel.get(token.index()).copied().unwrap_or(false)
    }
}

impl RoundObserver for SentinelObserver {
    fn on_start(&mut self, state: &TokenState) {
        for (v, held) in state.all_holdings().iter().enumerate() {
            if self.target[v] && held.iter().any(|t| self.is_sentinel(t)) {
                self.first = Some(0);
            }
        }
    }

    fn on_round(&mut self, record: &RoundRecord<'_>) {
        if let Some(mask) = self.captures.get(&record.round) {
            for &(v, t) in record.arrivals {
                if mask[v.index()] {
                    if let Some(s) = self.sentinel.get_mut(t.index()) {
                        *s = false;
                    }
                }
            }
        }
        if self.first.is_none()
            && record
                .arrivals
                .iter()
                .any(|&(v, t)| self.target[v.index()] && self.is_sentinel(t))
        {
            self.first = Some(record.round);
        }
    }
}

/// Re-checks every executed round independently of the engine: the
/// snapshot is connected, the plan is valid against the round-start state,
/// holdings only grow, and the reported arrivals are exactly the new pairs.
#[derive(Default)]
pub struct InvariantObserver {
    pub rounds_checked: usize,
    pub violations: Vec<String>,
}

impl InvariantObserver {
    pub fn new() -> Self {
        Self::default()
    }

    fn flag(&mut self, round: Round, what: String) {
        if self.violations.len() < 100 {
            self.violations.push(format!("round {round}: {what}"));
        }
    }
}

impl RoundObserver for InvariantObserver {
    fn wants_previous_state(&self) -> bool {
        true
    }

    fn on_round(&mut self, record: &RoundRecord<'_>) {
        self.rounds_checked += 1;
        let round = record.round;
        if let Err(defect) = validate_snapshot(record.snapshot) {
            self.flag(round, format!("snapshot: {defect}"));
        }
        let before = record.before.expect("previous state requested");
        if let Err(e) = record.plan.validate(record.adjacency, before) {
            self.flag(round, format!("plan: {e}"));
        }
        let mut new_pairs = 0;
        for (v, (old, new)) in before.all_holdings().iter().zip(record.after.all_holdings()).enumerate() {
            if !new.is_superset(old) {
                self.flag(round, format!("node {v} lost a token"));
            }
            new_pairs += new.len() - old.len().min(new.len());
        }
        if new_pairs != record.arrivals.len() {
            self.flag(round, format!("{} arrivals reported, {new_pairs} observed", record.arrivals.len()));
        }
        for &(v, t) in record.arrivals {
            if before.holds(v, t) || !record.after.holds(v, t) {
                self.flag(round, format!("arrival ({v}, {t}) is not new"));
            }
        }
        if record.after.current_round() != round {
            self.flag(round, "state round out of step".into());
        }
    }
}
