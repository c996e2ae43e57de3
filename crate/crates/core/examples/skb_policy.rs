//! Checks SKB policies for symmetry and mass.

use gossipsim::net::{apply_round, InsertionEvent, NetworkSnapshot, TokenState, TransferPlan};
use gossipsim::protocols::{check_skb_policy, uniform_skb, SkbContext, SkbPolicy};
use gossipsim::{NodeId, Round, TokenId};

/// Favors the newest token, which is fine: it only looks at arrival time.
struct Newest;

impl SkbPolicy for Newest {
    fn probability(&self, ctx: &SkbContext, _token: TokenId, arrival: Option<Round>) -> f64 {
        match arrival {
            Some(r) if r + 1 == ctx.round => 0.25,
            Some(_) => 0.05,
            None => 0.0,
        }
    }
}

/// Prefers token 0 over tokens that arrived with it.
struct Favorite;

impl SkbPolicy for Favorite {
    fn probability(&self, _ctx: &SkbContext, token: TokenId, arrival: Option<Round>) -> f64 {
        match arrival {
            None => 0.0,
            Some(_) if token == TokenId(0) => 0.5,
            Some(_) => 0.1,
        }
    }
}

fn main() {
    let snap = NetworkSnapshot::new(3, [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]);
    let adj = snap.adjacency();
    let mut state = TokenState::new(3, 4, 4);
    state.give(NodeId(0), TokenId(3));
    let batch: Vec<InsertionEvent> = (0..3)
        .map(|t| InsertionEvent {
            round: 1,
            node: NodeId(1),
            token: TokenId(t),
        })
        .collect();
    apply_round(&mut state, &adj, &TransferPlan::new(), &batch).unwrap();

    let report = check_skb_policy(&uniform_skb(), &state, 2);
    println!("uniform: {} nodes, {} violations", report.nodes_checked, report.violations.len());
    let report = check_skb_policy(&Newest, &state, 2);
    println!("newest-first: {} violations", report.violations.len());
    let report = check_skb_policy(&Favorite, &state, 2);
    for v in &report.violations {
        println!("favorite: {v}");
    }
}
