mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use gossipsim::net::{apply_round, Adjacency, NetworkSnapshot, RngStreams, TokenState, TransferPlan};
use gossipsim::protocols::{
    check_skb_policy, flood_step, rand_diff_step, sym_diff_step, uniform_skb, PolicyViolation, Protocol, RoundContext,
    SkbContext, SkbPolicy, SkbProtocol,
};
use gossipsim::{NodeId, Round, TokenId};

struct Fixture {
    snap: NetworkSnapshot,
    adj: Adjacency,
    state: TokenState,
}

impl Fixture {
    fn new(snap: NetworkSnapshot, universe: usize, holdings: &[&[u32]]) -> Self {
        let mut state = TokenState::new(snap.n(), universe, universe);
        for (v, toks) in holdings.iter().enumerate() {
            for &t in *toks {
                state.give(NodeId(v as u32), TokenId(t));
            }
        }
        let adj = snap.adjacency();
        Fixture { snap, adj, state }
    }

    fn ctx<'a>(&'a self, streams: &'a RngStreams, round: Round) -> RoundContext<'a> {
        RoundContext {
            round,
            snapshot: &self.snap,
            adjacency: &self.adj,
            state: &self.state,
            streams,
        }
    }
}

fn edge() -> NetworkSnapshot {
    NetworkSnapshot::new(2, [(NodeId(0), NodeId(1))])
}

/// Token counts over `trials` independent seeds of one planning function.
fn frequencies(f: &Fixture, trials: u64, plan: impl Fn(&RoundContext<'_>) -> TransferPlan) -> BTreeMap<(u32, u32), u64> {
    let mut counts = BTreeMap::new();
    for seed in 0..trials {
        let streams = RngStreams::new(seed);
        for s in plan(&f.ctx(&streams, 1)).sends {
            *counts.entry((s.from.0, s.token.0)).or_default() += 1;
        }
    }
    counts
}

#[test]
fn rand_diff_singleton_and_empty_differences() {
    let f = Fixture::new(edge(), 3, &[&[1, 2], &[1]]);
    let streams = RngStreams::new(0);
    let plan = rand_diff_step(&f.ctx(&streams, 1));
    assert_eq!(plan.sends.len(), 1);
    assert_eq!((plan.sends[0].from, plan.sends[0].token), (NodeId(0), TokenId(2)));
}

#[test]
fn rand_diff_draws_are_uniform_over_the_difference() {
    let f = Fixture::new(edge(), 4, &[&[1, 2, 3], &[]]);
    let c = frequencies(&f, 30_000, rand_diff_step);
    for t in 1..=3 {
        let hits = c.get(&(0, t)).copied().unwrap_or(0);
        assert!(common::within_three_sigma(hits, 30_000, 1.0 / 3.0), "token {t}: {hits}");
    }
    let f = Fixture::new(edge(), 8, &[&[0, 1, 2, 3, 4, 5, 6], &[1, 6]]);
    let c = frequencies(&f, 10_000, rand_diff_step);
    let by_token: BTreeMap<u32, u64> = c.into_iter().map(|((_, t), n)| (t, n)).collect();
    assert_eq!(by_token.keys().copied().collect::<Vec<_>>(), vec![0, 2, 3, 4, 5]);
    assert!(common::uniform_chi_square(&by_token, 5) > 0.001);
}

#[test]
fn sym_diff_examples() {
    let f = Fixture::new(edge(), 3, &[&[1], &[2]]);
    let c = frequencies(&f, 30_000, sym_diff_step);
    let u = c.get(&(0, 1)).copied().unwrap_or(0);
    let v = c.get(&(1, 2)).copied().unwrap_or(0);
    assert_eq!(u + v, 30_000);
    assert!(common::within_three_sigma(u, 30_000, 0.5), "{u}");

    let f = Fixture::new(edge(), 3, &[&[1, 2], &[1, 2]]);
    assert!(frequencies(&f, 100, sym_diff_step).is_empty());
    let f = Fixture::new(edge(), 3, &[&[1, 2], &[]]);
    let c = frequencies(&f, 1000, sym_diff_step);
    assert!(c.keys().all(|&(from, _)| from == 0));
}

fn skb_plan(policy: Box<dyn SkbPolicy>) -> impl Fn(&RoundContext<'_>) -> TransferPlan {
    let protocol = std::cell::RefCell::new(SkbProtocol::new(policy));
    move |ctx| protocol.borrow_mut().plan(ctx).unwrap()
}

/// Uniform weights computed through the default sampling path.
struct PlainUniform;
impl SkbPolicy for PlainUniform {
    fn probability(&self, ctx: &SkbContext, _token: TokenId, arrival: Option<Round>) -> f64 {
        if arrival.is_some() { 1.0 / ctx.held as f64 } else { 0.0 }
    }
}

#[test]
fn skb_uniform_four_tokens() {
    let f = Fixture::new(edge(), 4, &[&[0, 1, 2, 3], &[]]);
    for policy in [Box::new(uniform_skb()) as Box<dyn SkbPolicy>, Box::new(PlainUniform)] {
        let c = frequencies(&f, 30_000, skb_plan(policy));
        for t in 0..4 {
            let hits = c.get(&(0, t)).copied().unwrap_or(0);
            assert!(common::within_three_sigma(hits, 30_000, 0.25), "token {t}: {hits}");
        }
        assert!(c.keys().all(|&(from, _)| from == 0));
    }
}

#[test]
fn skb_single_token_broadcasts_and_empty_node_idles() {
    let star = NetworkSnapshot::new(4, [(NodeId(0), NodeId(1)), (NodeId(0), NodeId(2)), (NodeId(0), NodeId(3))]);
    let f = Fixture::new(star, 1, &[&[0], &[], &[], &[]]);
    let plan = skb_plan(Box::new(uniform_skb()));
    for seed in 0..50 {
        let streams = RngStreams::new(seed);
        let p = plan(&f.ctx(&streams, 1));
        let targets: BTreeSet<u32> = p.sends.iter().map(|s| s.to.0).collect();
        assert_eq!(targets, BTreeSet::from([1, 2, 3]));
        assert!(p.sends.iter().all(|s| s.from == NodeId(0) && s.token == TokenId(0)));
    }
}

#[test]
fn uniform_skb_weights() {
    let p = uniform_skb();
    let ctx = SkbContext {
        round: 6,
        node: NodeId(0),
        held: 2,
    };
    assert_eq!(p.probability(&ctx, TokenId(0), Some(0)), 0.5);
    assert_eq!(p.probability(&ctx, TokenId(1), Some(5)), 0.5);
    let empty = SkbContext { held: 0, ..ctx };
    assert_eq!(p.probability(&empty, TokenId(0), None), 0.0);
}

struct Doubled;
impl SkbPolicy for Doubled {
    fn probability(&self, _ctx: &SkbContext, token: TokenId, arrival: Option<Round>) -> f64 {
        match arrival {
            None => 0.0,
            Some(_) if token == TokenId(0) => 0.4,
            Some(_) => 0.2,
        }
    }
}

struct Heavy;
impl SkbPolicy for Heavy {
    fn probability(&self, _ctx: &SkbContext, _token: TokenId, arrival: Option<Round>) -> f64 {
        if arrival.is_some() { 0.6 } else { 0.0 }
    }
}

/// Node 1 receives tokens 0 and 1 in round 3.
fn arrived_together_at_round_3() -> TokenState {
    let snap = edge();
    let adj = snap.adjacency();
    let mut s = TokenState::new(2, 2, 2);
    s.give(NodeId(0), TokenId(0));
    apply_round(&mut s, &adj, &TransferPlan::new(), &[]).unwrap();
    apply_round(&mut s, &adj, &TransferPlan::new(), &[]).unwrap();
    let ins = [0, 1].map(|t| gossipsim::net::InsertionEvent {
        round: 3,
        node: NodeId(1),
        token: TokenId(t),
    });
    apply_round(&mut s, &adj, &TransferPlan::new(), &ins).unwrap();
    s
}

#[test]
fn policy_checker_examples() {
    let s = arrived_together_at_round_3();
    assert!(check_skb_policy(&uniform_skb(), &s, 4).is_ok());
    let r = check_skb_policy(&Doubled, &s, 4);
    assert!(r.violations.iter().any(|v| matches!(
        v,
        PolicyViolation::Asymmetric { node, first, second, arrival: 3, .. }
            if *node == NodeId(1) && *first == TokenId(0) && *second == TokenId(1)
    )));
    let r = check_skb_policy(&Heavy, &s, 4);
    assert!(r.violations.iter().any(|v| matches!(v, PolicyViolation::ExcessMass { mass, .. } if (*mass - 1.2).abs() < 1e-9)));
}

#[test]
fn flood_examples() {
    let path = NetworkSnapshot::new(3, [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]);
    let mut f = Fixture::new(path, 1, &[&[0], &[], &[]]);
    let streams = RngStreams::new(0);
    for _ in 0..2 {
        let plan = flood_step(TokenId(0), &f.ctx(&streams, f.state.current_round() + 1));
        apply_round(&mut f.state, &f.adj, &plan, &[]).unwrap();
    }
    assert!((0..3).all(|v| f.state.holds(NodeId(v), TokenId(0))));
    let plan = flood_step(TokenId(0), &f.ctx(&streams, 3));
    assert!(plan.is_empty());

    let star = NetworkSnapshot::new(5, (1..5).map(|v| (NodeId(0), NodeId(v))));
    let f = Fixture::new(star, 1, &[&[0], &[], &[], &[], &[]]);
    assert_eq!(flood_step(TokenId(0), &f.ctx(&streams, 1)).len(), 4);
}

/// Independent plan check: every send is on an edge of the snapshot, the
/// sender holds the token, and no directed edge is used twice.
fn plan_is_valid(snap: &NetworkSnapshot, state: &TokenState, plan: &TransferPlan) -> bool {
    let edges: BTreeSet<(u32, u32)> = snap.edges().iter().map(|&(a, b)| (a.0, b.0)).collect();
    let mut used = BTreeSet::new();
    plan.sends.iter().all(|s| {
        let (a, b) = (s.from.0.min(s.to.0), s.from.0.max(s.to.0));
        edges.contains(&(a, b)) && state.holds(s.from, s.token) && used.insert((s.from, s.to))
    })
}

fn random_fixture(seed: u64, n: usize, universe: usize, density: f64) -> Fixture {
    use rand::Rng;
    let mut r = common::rng(seed);
    let snap = common::random_connected(n, 0.3, &mut r);
    let mut state = TokenState::new(n, universe, universe);
    for v in 0..n {
        for t in 0..universe {
            if r.gen_bool(density) {
                state.give(NodeId(v as u32), TokenId(t as u32));
            }
        }
    }
    let adj = snap.adjacency();
    Fixture { snap, adj, state }
}

proptest! {
    #[test]
    fn rand_diff_sends_on_exactly_the_edges_with_progress(seed in 0u64..100_000, n in 2usize..10, density in 0.0f64..1.0) {
        let f = random_fixture(seed, n, 8, density);
        let streams = RngStreams::new(seed);
        let plan = rand_diff_step(&f.ctx(&streams, 1));
        prop_assert!(plan_is_valid(&f.snap, &f.state, &plan));
        for &(a, b) in f.snap.edges() {
            for (u, v) in [(a, b), (b, a)] {
                let sends: Vec<_> = plan.sends.iter().filter(|s| s.from == u && s.to == v).collect();
                let progress = f.state.holdings(u).difference_len(f.state.holdings(v)) > 0;
                prop_assert_eq!(sends.len(), usize::from(progress));
                for s in sends {
                    prop_assert!(!f.state.holds(v, s.token));
                }
            }
        }
    }

    #[test]
    fn sym_diff_uses_each_edge_at_most_once(seed in 0u64..100_000, n in 2usize..10, density in 0.0f64..1.0) {
        let f = random_fixture(seed, n, 8, density);
        let streams = RngStreams::new(seed);
        let plan = sym_diff_step(&f.ctx(&streams, 1));
        prop_assert!(plan_is_valid(&f.snap, &f.state, &plan));
        for &(a, b) in f.snap.edges() {
            let count = plan.sends.iter().filter(|s| (s.from, s.to) == (a, b) || (s.from, s.to) == (b, a)).count();
            let sym = f.state.holdings(a).symmetric_difference_len(f.state.holdings(b));
            prop_assert_eq!(count, usize::from(sym > 0));
        }
    }

    #[test]
    fn skb_sends_one_token_per_node(seed in 0u64..100_000, n in 2usize..10, density in 0.0f64..1.0) {
        let f = random_fixture(seed, n, 8, density);
        let streams = RngStreams::new(seed);
        let plan = skb_plan(Box::new(uniform_skb()))(&f.ctx(&streams, 1));
        prop_assert!(plan_is_valid(&f.snap, &f.state, &plan));
        for v in 0..n as u32 {
            let tokens: BTreeSet<TokenId> = plan.sends.iter().filter(|s| s.from == NodeId(v)).map(|s| s.token).collect();
            prop_assert!(tokens.len() <= 1);
            let sent = plan.sends.iter().filter(|s| s.from == NodeId(v)).count();
            let holds = !f.state.holdings(NodeId(v)).is_empty();
            prop_assert_eq!(sent, if holds { f.adj.degree(NodeId(v)) } else { 0 });
        }
    }

    #[test]
    fn flood_plans_are_valid(seed in 0u64..100_000, n in 2usize..10, density in 0.0f64..1.0) {
        let f = random_fixture(seed, n, 3, density);
        let streams = RngStreams::new(seed);
        let plan = flood_step(TokenId(1), &f.ctx(&streams, 1));
        prop_assert!(plan_is_valid(&f.snap, &f.state, &plan));
    }
}
