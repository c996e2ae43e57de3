//! Centralized k-gossip on a dynamic tree network, with per-stage logs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gossipsim::adversaries::build_random_interval_connected;
use gossipsim::central::{k_gossip_centralized, load_balance, CentralParams, ItemPool, Strategy};
use gossipsim::net::{Engine, RunOptions, TokenState};
use gossipsim::{NodeId, TokenId};

fn main() {
    let (n, k) = (32, 64);
    let schedule = build_random_interval_connected(n, 0.0, 5, n * k).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut initial = TokenState::new(n, k, k);
    for t in 0..k as u32 {
        initial.give(NodeId(rng.gen_range(0..n as u32)), TokenId(t));
    }
    for strategy in [Strategy::Auto, Strategy::Pipeline] {
        let params = CentralParams {
            strategy,
            ..CentralParams::default()
        };
        let mut engine = Engine::new(&schedule, initial.clone(), RunOptions::new(n * k, 0)).unwrap();
        let logs = k_gossip_centralized(&mut engine, &params).unwrap();
        println!("{strategy:?}: complete {} after {} rounds", engine.is_complete(), engine.rounds_executed());
        for log in logs.iter().take(6) {
            println!("  {:28} {:5} rounds {:5} arrivals  {}", log.stage, log.rounds, log.tokens_moved, log.note);
        }
    }

    // load balancing on its own: 20 tokens from node 0 over the other nodes
    let mut full = TokenState::new(n, 20, 20);
    for t in 0..20 {
        full.give(NodeId(0), TokenId(t));
    }
    let mut engine = Engine::new(&schedule, full, RunOptions::new(n * k, 0)).unwrap();
    let targets: Vec<NodeId> = (1..n as u32).map(NodeId).collect();
    let pool = ItemPool::with_copies(&(0..20).map(TokenId).collect::<Vec<_>>(), 3, 0, &mut rng);
    let out = load_balance(&mut engine, &[NodeId(0)], &targets, &pool, 10_000).unwrap();
    let counts = out.counts(n);
    println!(
        "load balance: {} items in {} rounds, per-node counts {:?}",
        pool.len(),
        out.log.rounds,
        &counts[1..]
    );
}
