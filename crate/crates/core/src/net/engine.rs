use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::apply_initial_insertions;
use super::{
    apply_round, validate_snapshot, Adjacency, AdversarySchedule, InsertionEvent, NetworkSnapshot,
    NodeId, Round, RngStreams, TokenId, TokenState, TransferPlan,
};
use crate::error::SimError;
use crate::protocols::{Protocol, RoundContext};
use crate::token_set::TokenSet;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_rounds: usize,
    pub seed: u64,
    /// Re-validate snapshot connectivity as rounds are consumed.
    pub validate: bool,
    /// Tokens that must reach every node for completion; defaults to all
    /// non-dummy tokens.
    pub tracked: Option<TokenSet>,
}

impl RunOptions {
    pub fn new(max_rounds: usize, seed: u64) -> Self {
        RunOptions {
            max_rounds,
            seed,
            validate: false,
            tracked: None,
        }
    }

    pub fn validating(mut self) -> Self {
        self.validate = true;
        self
    }

    pub fn tracking(mut self, tracked: TokenSet) -> Self {
        self.tracked = Some(tracked);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Round in which the last node completed; `None` on timeout.
    pub completion_round: Option<Round>,
    pub rounds_executed: Round,
    pub per_round_new_arrivals: Vec<u32>,
    pub per_node_completion: Vec<Option<Round>>,
    pub rng_seed: u64,
}

impl SimulationResult {
    pub fn timed_out(&self) -> bool {
        self.completion_round.is_none()
    }
}

/// Everything that happened in one executed round.
pub struct RoundRecord<'a> {
    pub round: Round,
    pub snapshot: &'a NetworkSnapshot,
    pub adjacency: &'a Adjacency,
    pub plan: &'a TransferPlan,
    pub insertions: &'a [InsertionEvent],
    /// `(node, token)` pairs that were new this round.
    pub arrivals: &'a [(NodeId, TokenId)],
    /// Holdings before the round, present only when some observer asks for it.
    pub before: Option<&'a TokenState>,
    pub after: &'a TokenState,
}

pub trait RoundObserver {
    /// Whether `RoundRecord::before` should be populated (costs a state clone per round).
    fn wants_previous_state(&self) -> bool {
        false
    }
    fn on_start(&mut self, _state: &TokenState) {}
    fn on_round(&mut self, record: &RoundRecord<'_>);
}

/// Drives a token state through a schedule one round at a time.
///
/// Protocols and centralized schedulers both go through `execute`, which
/// validates every plan before it touches the state.
pub struct Engine<'a> {
    schedule: &'a AdversarySchedule,
    state: TokenState,
    streams: RngStreams,
    options: RunOptions,
    tracked: TokenSet,
    tracked_held: Vec<usize>,
    per_node_completion: Vec<Option<Round>>,
    per_round_new: Vec<u32>,
    complete_nodes: usize,
    current: Option<(Arc<NetworkSnapshot>, Adjacency)>,
    observers: Vec<&'a mut dyn RoundObserver>,
}

impl<'a> Engine<'a> {
    pub fn new(
        schedule: &'a AdversarySchedule,
        mut initial: TokenState,
        options: RunOptions,
    ) -> Result<Self, SimError> {
        if initial.n() != schedule.n {
            return Err(SimError::NodeCountMismatch {
                schedule: schedule.n,
                state: initial.n(),
            });
        }
        if !schedule.covers(options.max_rounds) {
            return Err(SimError::HorizonTooShort {
                horizon: schedule.horizon(),
                max_rounds: options.max_rounds,
            });
        }
        if initial.current_round() != 0 {
            return Err(SimError::StateNotInitial(initial.current_round()));
        }
        initial.grow_universe(schedule.inserted_universe());
        apply_initial_insertions(&mut initial, schedule.insertions_at(0));

        let tracked = match &options.tracked {
            Some(t) => {
                let mut grown = TokenSet::new(initial.universe());
                for tok in t.iter() {
                    grown.insert(tok);
                }
                grown
            }
            None => initial.real_tokens(),
        };
        let tracked_held: Vec<usize> = initial
            .all_holdings()
            .iter()
            .map(|h| h.intersection_len(&tracked))
            .collect();
        let per_node_completion: Vec<Option<Round>> = tracked_held
            .iter()
            .map(|&c| (c == tracked.len()).then_some(0))
            .collect();
        let complete_nodes = per_node_completion.iter().filter(|c| c.is_some()).count();
        let mut engine = Engine {
            schedule,
            streams: RngStreams::new(options.seed),
            state: initial,
            options,
            tracked,
            tracked_held,
            per_node_completion,
            per_round_new: Vec::new(),
            complete_nodes,
            current: None,
            observers: Vec::new(),
        };
        engine.prepare()?;
        Ok(engine)
    }

    pub fn observe(&mut self, observer: &'a mut dyn RoundObserver) {
        observer.on_start(&self.state);
        self.observers.push(observer);
    }

    fn prepare(&mut self) -> Result<(), SimError> {
        let round = self.next_round();
        if self.rounds_left() == 0 {
            return Ok(());
        }
        let snap = self
            .schedule
            .snapshot(round)
            .ok_or(SimError::ScheduleExhausted(round))?;
        let fresh = !matches!(&self.current, Some((cur, _)) if Arc::ptr_eq(cur, snap));
        if fresh {
            if self.options.validate {
                validate_snapshot(snap).map_err(|defect| SimError::BadSnapshot { round, defect })?;
            }
            self.current = Some((snap.clone(), snap.adjacency()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> &AdversarySchedule {
        self.schedule
    }

    pub fn n(&self) -> usize {
        self.state.n()
    }

    /// The round that the next `execute` runs.
    pub fn next_round(&self) -> Round {
        self.state.current_round() + 1
    }

    pub fn rounds_executed(&self) -> Round {
        self.state.current_round()
    }

    pub fn rounds_left(&self) -> usize {
        self.options.max_rounds.saturating_sub(self.state.current_round() as usize)
    }

    pub fn state(&self) -> &TokenState {
        &self.state
    }

    pub fn streams(&self) -> &RngStreams {
        &self.streams
    }

    pub fn tracked(&self) -> &TokenSet {
        &self.tracked
    }

    /// The snapshot of the next round. Panics if the round limit is reached.
    pub fn snapshot(&self) -> &NetworkSnapshot {
        &self.current.as_ref().expect("no rounds left").0
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.current.as_ref().expect("no rounds left").1
    }

    pub fn rng(&self, node: NodeId) -> ChaCha8Rng {
        self.streams.stream(self.next_round(), node)
    }

    pub fn context(&self) -> RoundContext<'_> {
        RoundContext {
            round: self.next_round(),
            snapshot: self.snapshot(),
            adjacency: self.adjacency(),
            state: &self.state,
            streams: &self.streams,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.complete_nodes == self.n()
    }

    /// Runs one round with `plan` plus the schedule's insertions for it.
    pub fn execute(&mut self, plan: &TransferPlan) -> Result<Vec<(NodeId, TokenId)>, SimError> {
        if self.rounds_left() == 0 {
            return Err(SimError::RoundLimit(self.options.max_rounds));
        }
        let round = self.next_round();
        let insertions = self.schedule.insertions_at(round);
        let before = self
            .observers
            .iter()
            .any(|o| o.wants_previous_state())
            .then(|| self.state.clone());
        let (snap, adjacency) = self.current.as_ref().expect("prepared");
        let arrivals = apply_round(&mut self.state, adjacency, plan, insertions)?;
        for &(node, token) in &arrivals {
            if self.tracked.contains(token) {
                let held = &mut self.tracked_held[node.index()];
                *held += 1;
                if *held == self.tracked.len() && self.per_node_completion[node.index()].is_none() {
                    self.per_node_completion[node.index()] = Some(round);
                    self.complete_nodes += 1;
                }
            }
        }
        self.per_round_new.push(arrivals.len() as u32);
        if !self.observers.is_empty() {
            let record = RoundRecord {
                round,
                snapshot: snap,
                adjacency,
                plan,
                insertions,
                arrivals: &arrivals,
                before: before.as_ref(),
                after: &self.state,
            };
            for obs in self.observers.iter_mut() {
                obs.on_round(&record);
            }
        }
        self.prepare()?;
        Ok(arrivals)
    }

    /// Runs `protocol` until completion or the round limit.
    pub fn run(&mut self, protocol: &mut dyn Protocol) -> Result<(), SimError> {
        while !self.is_complete() && self.rounds_left() > 0 {
            let plan = protocol.plan(&self.context())?;
            self.execute(&plan)?;
        }
        Ok(())
    }

    pub fn result(&self) -> SimulationResult {
        let completion_round = self
            .is_complete()
            .then(|| self.per_node_completion.iter().map(|c| c.unwrap()).max().unwrap_or(0));
        SimulationResult {
            completion_round,
            rounds_executed: self.state.current_round(),
            per_round_new_arrivals: self.per_round_new.clone(),
            per_node_completion: self.per_node_completion.clone(),
            rng_seed: self.streams.seed(),
        }
    }

    pub fn finish(self) -> (SimulationResult, TokenState) {
        let result = self.result();
        (result, self.state)
    }
}

/// Runs `protocol` against `schedule` from `initial`. Identical inputs give
/// identical results.
pub fn run_simulation(
    schedule: &AdversarySchedule,
    protocol: &mut dyn Protocol,
    initial: TokenState,
    options: RunOptions,
) -> Result<(SimulationResult, TokenState), SimError> {
    let mut engine = Engine::new(schedule, initial, options)?;
    engine.run(protocol)?;
    Ok(engine.finish())
}
