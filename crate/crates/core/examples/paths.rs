//! Paths-respecting schedules and their validator.

use std::sync::Arc;

use gossipsim::adversaries::{build_center_terminal, build_ring_failure, validate_paths_respecting, RingPolicy};
use gossipsim::net::NetworkSnapshot;

fn main() {
    let ring = build_ring_failure(10, RingPolicy::Random, 4, 50).unwrap();
    let report = validate_paths_respecting(&ring.schedule, &ring.infrastructure, &ring.systems).unwrap();
    println!(
        "ring n=10: {} systems over {} rounds, max inactive {}, accepted {}",
        report.systems_checked,
        report.rounds_checked,
        report.max_inactive,
        report.accepted()
    );

    let ct = build_center_terminal(16, 5, 2, 50).unwrap();
    let report = validate_paths_respecting(&ct.schedule, &ct.infrastructure, &ct.systems).unwrap();
    println!(
        "center-terminal n=16 r=5: {} systems, max inactive {} of budget {}, accepted {}",
        report.systems_checked,
        report.max_inactive,
        ct.systems[0].budget(),
        report.accepted()
    );

    // take a second ring edge down in round 3: both arcs between some pair break
    let mut broken = ring.schedule.clone();
    let snap = broken.snapshot(3).unwrap();
    let edges = snap.edges();
    let kept = edges.iter().copied().skip(1);
    broken.snapshots[2] = Arc::new(NetworkSnapshot::new(10, kept));
    let report = validate_paths_respecting(&broken, &ring.infrastructure, &ring.systems).unwrap();
    match report.first_violation {
        Some(v) => println!("mutated ring: system {} breaks in round {} ({} inactive, budget {})", v.system, v.round, v.inactive, v.budget),
        None => println!("mutated ring: accepted"),
    }
}
