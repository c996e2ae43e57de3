//! Rand-Diff, Sym-Diff and uniform SKB on the same random dynamic network.

use gossipsim::adversaries::build_random_interval_connected;
use gossipsim::net::{run_simulation, RunOptions, TokenState};
use gossipsim::protocols::{uniform_skb, Protocol, RandDiff, SkbProtocol, SymDiff};

fn main() {
    let n = 48;
    let schedule = build_random_interval_connected(n, 0.02, 11, 20_000).unwrap();
    let protocols: Vec<(&str, Box<dyn Protocol>)> = vec![
        ("rand-diff", Box::new(RandDiff)),
        ("sym-diff", Box::new(SymDiff)),
        ("skb-uniform", Box::new(SkbProtocol::new(Box::new(uniform_skb())))),
    ];
    for (name, mut protocol) in protocols {
        let mut rounds = Vec::new();
        for seed in 0..5 {
            let (result, _) = run_simulation(
                &schedule,
                protocol.as_mut(),
                TokenState::one_token_per_node(n, n),
                RunOptions::new(20_000, seed),
            )
            .unwrap();
            rounds.push(result.completion_round.map_or("timeout".to_string(), |r| r.to_string()));
        }
        println!("{name:12} n={n} k={n}: {}", rounds.join(" "));
    }
}
