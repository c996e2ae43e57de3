use serde::{Deserialize, Serialize};

use super::{Adjacency, InsertionEvent, NodeId, Round, TokenId};
use crate::token_set::TokenSet;

/// Per-node token holdings `S(u)` and first-arrival rounds `a_t(τ, u)`.
///
/// Holdings only grow. The arrival log of a node lists `(round, token)` in
/// arrival order, so it is grouped by round; initially held tokens arrive
/// at round 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenState {
    universe: usize,
    original_tokens: usize,
    holdings: Vec<TokenSet>,
    arrival_log: Vec<Vec<(Round, TokenId)>>,
    current_round: Round,
}

impl TokenState {
    /// Empty state over `n` nodes and a universe of `universe` tokens of which
    /// the first `original_tokens` are real (the rest are dummies).
    pub fn new(n: usize, universe: usize, original_tokens: usize) -> Self {
        assert!(original_tokens <= universe);
        TokenState {
            universe,
            original_tokens,
            holdings: vec![TokenSet::new(universe); n],
            arrival_log: vec![Vec::new(); n],
            current_round: 0,
        }
    }

    /// All `k` tokens at `source`.
    pub fn single_source(n: usize, k: usize, source: NodeId) -> Self {
        let mut s = TokenState::new(n, k, k);
        for t in 0..k {
            s.give(source, TokenId(t as u32));
        }
        s
    }

    /// Token `i` at node `i mod n`.
    pub fn one_token_per_node(n: usize, k: usize) -> Self {
        let mut s = TokenState::new(n, k, k);
        for t in 0..k {
            s.give(NodeId((t % n) as u32), TokenId(t as u32));
        }
        s
    }

    /// Places a token before the first round. Panics once rounds have run.
    pub fn give(&mut self, node: NodeId, token: TokenId) {
        assert_eq!(self.current_round, 0, "initial placement after round 0");
        if self.holdings[node.index()].insert(token) {
            self.arrival_log[node.index()].push((0, token));
        }
    }

    pub fn n(&self) -> usize {
        self.holdings.len()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn original_tokens(&self) -> usize {
        self.original_tokens
    }

    pub fn current_round(&self) -> Round {
        self.current_round
    }

    pub fn holdings(&self, node: NodeId) -> &TokenSet {
        &self.holdings[node.index()]
    }

    pub fn all_holdings(&self) -> &[TokenSet] {
        &self.holdings
    }

    pub fn holds(&self, node: NodeId, token: TokenId) -> bool {
        self.holdings[node.index()].contains(token)
    }

    /// `(round, token)` pairs in arrival order.
    pub fn arrivals(&self, node: NodeId) -> &[(Round, TokenId)] {
        &self.arrival_log[node.index()]
    }

    /// First-arrival round of `token` at `node`, or `None` if not held.
    pub fn arrival(&self, token: TokenId, node: NodeId) -> Option<Round> {
        if !self.holds(node, token) {
            return None;
        }
        self.arrival_log[node.index()]
            .iter()
            .find(|&&(_, t)| t == token)
            .map(|&(r, _)| r)
    }

    /// The set of real (non-dummy) tokens.
    pub fn real_tokens(&self) -> TokenSet {
        TokenSet::prefix(self.universe, self.original_tokens)
    }

    /// Distinct tokens present anywhere.
    pub fn tokens_in_system(&self) -> TokenSet {
        let mut all = TokenSet::new(self.universe);
        for h in &self.holdings {
            all.union_with(h);
        }
        all
    }

    /// Extends the universe (e.g. to admit tokens named by insertions).
    pub fn grow_universe(&mut self, universe: usize) {
        if universe <= self.universe {
            return;
        }
        for h in &mut self.holdings {
            let mut bigger = TokenSet::new(universe);
            bigger.union_with_smaller(h);
            *h = bigger;
        }
        self.universe = universe;
    }
}

impl TokenSet {
    fn union_with_smaller(&mut self, other: &TokenSet) {
        for t in other.iter() {
            self.insert(t);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Send {
    pub from: NodeId,
    pub to: NodeId,
    pub token: TokenId,
}

/// The `(directed edge, token)` sends executed in one round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferPlan {
    pub sends: Vec<Send>,
}

impl TransferPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, from: NodeId, to: NodeId, token: TokenId) {
        self.sends.push(Send { from, to, token });
    }

    pub fn len(&self) -> usize {
        self.sends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sends.is_empty()
    }

    /// Checks the plan against a round's adjacency and the round-start state.
    pub fn validate(&self, adjacency: &Adjacency, state: &TokenState) -> Result<(), PlanError> {
        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(self.sends.len());
        for s in &self.sends {
            if s.from.index() >= adjacency.n() || s.to.index() >= adjacency.n() || !adjacency.has_edge(s.from, s.to) {
                return Err(PlanError::NotAnEdge { from: s.from, to: s.to });
            }
            if s.token.index() >= state.universe() || !state.holds(s.from, s.token) {
                return Err(PlanError::NotHeld { from: s.from, token: s.token });
            }
            edges.push((s.from, s.to));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(PlanError::EdgeOverCapacity { from: w[0].0, to: w[0].1 });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("send on ({from}, {to}) which is not an edge of this round")]
    NotAnEdge { from: NodeId, to: NodeId },
    #[error("node {from} sends token {token} it does not hold")]
    NotHeld { from: NodeId, token: TokenId },
    #[error("more than one send on directed edge ({from}, {to})")]
    EdgeOverCapacity { from: NodeId, to: NodeId },
    #[error("insertion scheduled for round {found} applied in round {expected}")]
    InsertionRound { expected: Round, found: Round },
    #[error("insertion of token {token} at node {node} outside the state's range")]
    InsertionOutOfRange { node: NodeId, token: TokenId },
}

/// Executes one round: validates the plan, then applies every send and
/// insertion atomically. Newly present tokens get the executed round as
/// their arrival time. Returns the new `(node, token)` arrivals.
pub fn apply_round(
    state: &mut TokenState,
    adjacency: &Adjacency,
    plan: &TransferPlan,
    insertions: &[InsertionEvent],
) -> Result<Vec<(NodeId, TokenId)>, PlanError> {
    let round = state.current_round + 1;
    plan.validate(adjacency, state)?;
    for ev in insertions {
        if ev.round != round {
            return Err(PlanError::InsertionRound { expected: round, found: ev.round });
        }
        if ev.node.index() >= state.n() || ev.token.index() >= state.universe {
            return Err(PlanError::InsertionOutOfRange { node: ev.node, token: ev.token });
        }
    }
    state.current_round = round;
    let mut arrivals = Vec::new();
    let deliveries = plan
        .sends
        .iter()
        .map(|s| (s.to, s.token))
        .chain(insertions.iter().map(|e| (e.node, e.token)));
    for (node, token) in deliveries {
        if state.holdings[node.index()].insert(token) {
            state.arrival_log[node.index()].push((round, token));
            arrivals.push((node, token));
        }
    }
    Ok(arrivals)
}

/// Applies round-0 insertions to an initial state.
pub(crate) fn apply_initial_insertions(state: &mut TokenState, insertions: &[InsertionEvent]) {
    for ev in insertions {
        state.give(ev.node, ev.token);
    }
}
