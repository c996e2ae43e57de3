mod common;

use std::collections::{BTreeMap, BTreeSet};

use gossipsim::adversaries::{
    build_blocker_line_invasive, build_blocker_line_oblivious, build_center_terminal, build_named,
    build_random_interval_connected, build_ring_failure, build_skb_adversary, random_spanning_tree,
    validate_paths_respecting, AdversaryName, AdversaryParams, BlockerLineParams, PathSystem, RingPolicy,
    SkbAdversaryParams,
};
use gossipsim::net::{dgs, validate_snapshot, AdversarySchedule, Mode, NetworkSnapshot};
use gossipsim::{NodeId, TokenId};

fn all_connected(s: &AdversarySchedule) -> bool {
    s.snapshots.iter().all(|g| validate_snapshot(g).is_ok() && common::connected(g.n(), g.edges()))
}

/// Blocker parameters recomputed from scratch with integer arithmetic.
fn blocker_oracle(n: usize) -> (usize, usize, usize, usize) {
    let mut root = 0;
    while (root + 1) * (root + 1) <= n {
        root += 1;
    }
    let mut lg = 0;
    while (1usize << lg) < n {
        lg += 1;
    }
    let exact_log = (n as f64).log2();
    let phases = std::cmp::max(1, (root as f64 / (2.0 * exact_log)) as usize);
    let segments = std::cmp::max(1, root / 3);
    let seg_rounds = std::cmp::max(1, root / 32);
    (phases, segments, seg_rounds, lg)
}

#[test]
fn blocker_parameters_match_the_formulas() {
    for n in [64, 256, 1024, 4096, 10_000] {
        let p = BlockerLineParams::new(n, 0);
        assert_eq!(
            (p.phases, p.segments_per_phase, p.segment_rounds, p.inner_width),
            blocker_oracle(n),
            "n = {n}"
        );
    }
    let p = BlockerLineParams::new(256, 0);
    assert_eq!((p.phases, p.segment_rounds), (1, 1));
}

#[test]
fn invasive_blocker_is_a_line_with_growing_left_part() {
    let p = BlockerLineParams::new(256, 3);
    let s = build_blocker_line_invasive(&p).unwrap();
    assert_eq!(s.mode, Mode::Invasive);
    assert!(s.snapshots.iter().all(|g| common::is_hamiltonian_path(g)));
    assert!(all_connected(&s));
    // the left part hangs off node 0 on the side away from the current interval
    for (j, seg) in s.metadata.segments.iter().enumerate() {
        let adj = s.snapshot(seg.first_round).unwrap().adjacency();
        let mut prev = NodeId(0);
        let mut cur = adj.neighbors(NodeId(0)).iter().copied().find(|&v| v != seg.inner[0]);
        let mut left = BTreeSet::new();
        while let Some(v) = cur {
            left.insert(v);
            cur = adj.neighbors(v).iter().copied().find(|&w| w != prev);
            prev = v;
        }
        let earlier: BTreeSet<NodeId> = s.metadata.segments[..j].iter().flat_map(|g| g.inner.clone()).collect();
        assert_eq!(left.len(), j * p.inner_width, "segment {j}");
        assert_eq!(left, earlier);
    }
}

#[test]
fn invasive_insertions_cover_blockers_and_respect_the_partition() {
    let p = BlockerLineParams::new(256, 5);
    let s = build_blocker_line_invasive(&p).unwrap();
    let groups = &s.metadata.blocker_groups;
    let root = 16;
    assert_eq!(groups.len(), root);
    let mut seen = BTreeSet::new();
    for g in groups {
        assert_eq!(g.len(), root);
        for t in g {
            assert!(seen.insert(*t));
        }
    }
    let phase1: BTreeSet<TokenId> = groups[0].iter().copied().collect();
    assert!(s.insertions.iter().all(|e| phase1.contains(&e.token)));
    // post-phase: every right-line node ends up with the whole group
    let last = s.horizon() as u32;
    for &v in &s.metadata.target_nodes {
        let got: BTreeSet<TokenId> =
            s.insertions.iter().filter(|e| e.round == last && e.node == v).map(|e| e.token).collect();
        assert_eq!(got, phase1);
    }
    // pre-segment: about half of the interval's entries, each node in the interval
    let seg = &s.metadata.segments[0];
    let pre: Vec<_> = s.insertions.iter().filter(|e| e.round == seg.first_round - 1).collect();
    let interval: BTreeSet<NodeId> = seg.inner.iter().chain(&seg.outer[..root - p.inner_width]).copied().collect();
    assert!(pre.iter().all(|e| interval.contains(&e.node)));
    let frac = pre.len() as f64 / (root * root) as f64;
    assert!((0.35..0.65).contains(&frac), "{frac}");
}

#[test]
fn blocker_builds_are_byte_identical() {
    let p = BlockerLineParams::new(256, 11);
    let a = dgs::export_schedule(&build_blocker_line_invasive(&p).unwrap());
    let b = dgs::export_schedule(&build_blocker_line_invasive(&p).unwrap());
    assert_eq!(a, b);
    let a = dgs::export_schedule(&build_blocker_line_oblivious(&p).unwrap());
    let b = dgs::export_schedule(&build_blocker_line_oblivious(&p).unwrap());
    assert_eq!(a, b);
}

/// Rounds of the oblivious construction, counted phase by phase.
fn oblivious_round_count(n: usize) -> usize {
    let (phases, segments, seg_rounds, _) = blocker_oracle(n);
    let clique = (3.0 * (n as f64).log2()).ceil() as usize;
    let mut total = 0;
    for _ in 0..phases {
        total += 2;
        for j in 0..segments {
            total += seg_rounds;
            if j + 1 < segments {
                total += clique + 1;
            }
        }
        total += 1;
    }
    total
}

#[test]
fn oblivious_horizon_matches_round_count() {
    for n in [64, 256, 1024] {
        let s = build_blocker_line_oblivious(&BlockerLineParams::new(n, 1)).unwrap();
        assert_eq!(s.horizon(), oblivious_round_count(n), "n = {n}");
        assert!(s.insertions.is_empty());
        assert_eq!(s.mode, Mode::Oblivious);
        assert!(all_connected(&s));
    }
}

#[test]
fn oblivious_phase_start_and_clique_rounds() {
    let n = 256;
    let p = BlockerLineParams::new(n, 2);
    let s = build_blocker_line_oblivious(&p).unwrap();
    let x = &s.metadata.blocker_capture[0].nodes;
    assert_eq!(x.len(), 16);
    let first = s.snapshot(1).unwrap();
    let base = s.snapshot(s.metadata.segments[0].first_round).unwrap();
    for &v in x {
        assert!(first.has_edge(NodeId(0), v));
    }
    assert!(base.is_subgraph_of(first));
    let seg = &s.metadata.segments[0];
    let outer_x: Vec<NodeId> = seg.outer[..16 - p.inner_width].to_vec();
    let clique = (3.0 * 8.0f64).ceil() as u32;
    for t in seg.last_round + 1..=seg.last_round + clique {
        let g = s.snapshot(t).unwrap();
        for (i, &a) in outer_x.iter().enumerate() {
            for &b in &outer_x[i + 1..] {
                assert!(g.has_edge(a, b), "round {t}");
            }
        }
    }
    let bi = s.snapshot(seg.last_round + clique + 1).unwrap();
    let next = &s.metadata.segments[1];
    let next_x: Vec<NodeId> = next.inner.iter().chain(&next.outer[..16 - p.inner_width]).copied().collect();
    for &a in &outer_x {
        for &b in &next_x {
            assert!(bi.has_edge(a, b));
        }
    }
}

#[test]
fn invasive_and_oblivious_share_partition_and_intervals() {
    let p = BlockerLineParams::new(1024, 8);
    let a = build_blocker_line_invasive(&p).unwrap();
    let b = build_blocker_line_oblivious(&p).unwrap();
    assert_eq!(a.metadata.blocker_groups, b.metadata.blocker_groups);
    let nodes = |s: &AdversarySchedule| -> Vec<(Vec<NodeId>, Vec<NodeId>)> {
        s.metadata.segments.iter().map(|g| (g.inner.clone(), g.outer.clone())).collect()
    };
    assert_eq!(nodes(&a), nodes(&b));
}

#[test]
fn blocker_line_rejects_unusable_sizes() {
    assert!(build_blocker_line_invasive(&BlockerLineParams::new(50, 0)).is_err());
    assert!(build_blocker_line_invasive(&BlockerLineParams::new(36, 0)).is_err());
    assert!(build_blocker_line_oblivious(&BlockerLineParams::new(25, 0)).is_err());
    assert!(build_blocker_line_oblivious(&BlockerLineParams::new(49, 0)).is_ok());
}

#[test]
fn skb_staircase_and_partition() {
    let s = build_skb_adversary(&SkbAdversaryParams::new(512, 4)).unwrap();
    assert_eq!(s.mode, Mode::Invasive);
    assert!(all_connected(&s));
    let sets = &s.metadata.blocker_groups;
    let mut seen = BTreeSet::new();
    for set in sets {
        for &t in set {
            assert!(seen.insert(t));
        }
    }
    let sentinels: BTreeSet<TokenId> = s.metadata.sentinel_tokens.iter().copied().collect();
    assert!(seen.is_disjoint(&sentinels));
    assert_eq!(seen.len() + sentinels.len(), 512);

    for seg in &s.metadata.segments[..3] {
        let watched: Vec<NodeId> = seg.inner.iter().chain(&seg.outer).copied().collect();
        let base = (seg.phase as usize - 1) * watched.len();
        let r1 = s.insertions_at(seg.first_round);
        let nodes: BTreeSet<NodeId> = r1.iter().map(|e| e.node).collect();
        assert_eq!(nodes, BTreeSet::from([watched[0]]));
        assert_eq!(r1.iter().map(|e| e.token).collect::<Vec<_>>(), sets[base]);
        let r3 = s.insertions_at(seg.first_round + 2);
        for (m, k) in [(0, 2), (1, 1), (2, 0)] {
            let got: Vec<TokenId> = r3.iter().filter(|e| e.node == watched[m]).map(|e| e.token).collect();
            assert_eq!(got, sets[base + k]);
        }
    }
    assert!(build_skb_adversary(&SkbAdversaryParams::new(63, 0)).is_err());
}

#[test]
fn skb_parameters_match_the_formulas() {
    for n in [64, 512, 4096] {
        let p = SkbAdversaryParams::new(n, 0);
        let mut cube = 0;
        while (cube + 1) * (cube + 1) * (cube + 1) <= n {
            cube += 1;
        }
        let mut sq = 0;
        while (sq + 1) * (sq + 1) * (sq + 1) <= n * n {
            sq += 1;
        }
        assert_eq!(p.blocker_set_size, cube);
        assert_eq!(p.sets_per_phase, cube);
        assert_eq!(p.segments_per_phase, sq);
        assert_eq!(p.phases, std::cmp::max(1, (cube as f64 / (2.0 * (n as f64).log2())) as usize));
    }
}

#[test]
fn ring_round_robin_and_validation() {
    let p = build_ring_failure(4, RingPolicy::RoundRobin, 0, 12).unwrap();
    for t in 1..=12u32 {
        let g = p.schedule.snapshot(t).unwrap();
        let a = t % 4;
        assert!(!g.has_edge(NodeId(a), NodeId((a + 1) % 4)));
        assert_eq!(g.edge_count(), 3);
        assert!(common::is_hamiltonian_path(g));
    }
    let report = validate_paths_respecting(&p.schedule, &p.infrastructure, &p.systems).unwrap();
    assert!(report.accepted());
    assert_eq!(report.max_inactive, 1);
    for policy in [RingPolicy::Random, RingPolicy::FixedEdge] {
        let p = build_ring_failure(9, policy, 7, 40).unwrap();
        assert!(p.schedule.snapshots.iter().all(|g| common::is_hamiltonian_path(g)));
        assert!(validate_paths_respecting(&p.schedule, &p.infrastructure, &p.systems).unwrap().accepted());
    }
}

#[test]
fn ring_with_both_paths_broken_is_rejected() {
    let p = build_ring_failure(4, RingPolicy::RoundRobin, 0, 4).unwrap();
    let mut s = p.schedule.clone();
    // round 2 already lacks (2,3); dropping (0,1) cuts both arcs between 0 and 2
    let g = s.snapshot(2).unwrap();
    let kept: Vec<_> = g.edges().iter().copied().filter(|&e| e != (NodeId(0), NodeId(1))).collect();
    s.snapshots[1] = std::sync::Arc::new(NetworkSnapshot::new(4, kept));
    let report = validate_paths_respecting(&s, &p.infrastructure, &p.systems).unwrap();
    let v = report.first_violation.unwrap();
    assert_eq!((v.round, v.inactive, v.budget), (2, 2, 1));
}

#[test]
fn center_terminal_counts() {
    let (n, r) = (12usize, 6usize);
    let p = build_center_terminal(n, r, 3, 30).unwrap();
    let infra_edges = r * (n - r) + r * (r - 1) / 2;
    assert_eq!(p.infrastructure.edge_count(), infra_edges);
    for g in &p.schedule.snapshots {
        // independent count of removed infrastructure edges
        let removed = p.infrastructure.edges().iter().filter(|&&(a, b)| !g.has_edge(a, b)).count();
        assert_eq!(removed, 2 * (n - r));
        let isolated = (0..r as u32)
            .filter(|&c| (r as u32..n as u32).all(|v| !g.has_edge(NodeId(c), NodeId(v))))
            .count();
        assert_eq!(isolated, 2);
        assert!(common::connected(n, g.edges()));
    }
    // exhaustive per-round inactive counts
    let mut worst = 0;
    for g in &p.schedule.snapshots {
        for sys in &p.systems {
            let inactive: usize = sys
                .paths
                .iter()
                .flat_map(|path| path.windows(2))
                .filter(|w| !g.has_edge(w[0], w[1]))
                .count();
            assert!(inactive <= r - 2, "{sys:?}");
            worst = worst.max(inactive);
        }
    }
    let report = validate_paths_respecting(&p.schedule, &p.infrastructure, &p.systems).unwrap();
    assert!(report.accepted());
    assert_eq!(report.max_inactive, worst);

    let p = build_center_terminal(8, 3, 0, 5).unwrap();
    assert!(p.schedule.snapshots.iter().all(|g| **g == p.infrastructure));
    assert!(build_center_terminal(8, 2, 0, 5).is_err());
    assert!(build_center_terminal(8, 8, 0, 5).is_err());
}

#[test]
fn path_systems_are_disjoint() {
    let p = build_center_terminal(10, 5, 1, 3).unwrap();
    for sys in &p.systems {
        let mut interior = BTreeSet::new();
        for path in &sys.paths {
            assert_eq!(path.first(), Some(&sys.source));
            assert_eq!(path.last(), Some(&sys.dest));
            for v in &path[1..path.len() - 1] {
                assert!(interior.insert(*v));
            }
        }
    }
}

#[test]
fn validator_rejects_edges_outside_infrastructure() {
    let p = build_ring_failure(5, RingPolicy::RoundRobin, 0, 3).unwrap();
    let mut s = p.schedule.clone();
    let mut edges = s.snapshots[0].edges().to_vec();
    edges.push((NodeId(0), NodeId(2)));
    s.snapshots[0] = std::sync::Arc::new(NetworkSnapshot::new(5, edges));
    assert!(validate_paths_respecting(&s, &p.infrastructure, &p.systems).is_err());
    let bogus = vec![PathSystem {
        source: NodeId(0),
        dest: NodeId(2),
        paths: vec![vec![NodeId(0), NodeId(2)]],
    }];
    assert!(validate_paths_respecting(&p.schedule, &p.infrastructure, &bogus).is_err());
}

#[test]
fn random_schedules_extremes() {
    let s = build_random_interval_connected(10, 0.0, 1, 50).unwrap();
    assert!(s.snapshots.iter().all(|g| g.edge_count() == 9 && common::connected(10, g.edges())));
    let s = build_random_interval_connected(7, 1.0, 1, 5).unwrap();
    assert!(s.snapshots.iter().all(|g| **g == NetworkSnapshot::complete(7)));
}

#[test]
fn spanning_trees_on_four_nodes_are_uniform() {
    let trees = common::enumerate_trees(4);
    assert_eq!(trees.len(), 16);
    let index: BTreeMap<Vec<(u32, u32)>, usize> = trees.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut r = common::rng(2024);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..16_000 {
        let mut t: Vec<(u32, u32)> =
            random_spanning_tree(4, &mut r).into_iter().map(|(a, b)| (a.0.min(b.0), a.0.max(b.0))).collect();
        t.sort_unstable();
        *counts.entry(*index.get(&t).expect("not a tree")).or_default() += 1;
    }
    let p = common::uniform_chi_square(&counts, 16);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn blocker_schedule_round_trips_through_dgs() {
    for s in [
        build_blocker_line_invasive(&BlockerLineParams::new(64, 9)).unwrap(),
        build_blocker_line_oblivious(&BlockerLineParams::new(64, 9)).unwrap(),
    ] {
        let text = dgs::export_schedule(&s);
        let back = dgs::import_schedule(&text).unwrap();
        assert!(back.same_content(&s));
        assert_eq!(dgs::export_schedule(&back), text);
    }
}

#[test]
fn registry_builds_every_generator() {
    let params = AdversaryParams::default();
    for name in AdversaryName::ALL {
        if name == AdversaryName::File {
            continue;
        }
        let n = match name {
            AdversaryName::BlockerInvasive | AdversaryName::BlockerOblivious | AdversaryName::Skb => 64,
            _ => 10,
        };
        let g = build_named(name, n, 1, &params, 20).unwrap();
        assert!(all_connected(&g.schedule), "{name}");
        if let Some((infra, systems)) = &g.paths {
            assert!(validate_paths_respecting(&g.schedule, infra, systems).unwrap().accepted());
        }
    }
}
