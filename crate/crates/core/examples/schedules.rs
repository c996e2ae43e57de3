//! Builds a few adversary schedules and round-trips one through DGS1.

use gossipsim::adversaries::{
    build_blocker_line_invasive, build_random_interval_connected, build_skb_adversary, BlockerLineParams,
    SkbAdversaryParams,
};
use gossipsim::net::dgs;

fn main() {
    let blocker = build_blocker_line_invasive(&BlockerLineParams::new(256, 7)).expect("256 is a supported size");
    let meta = &blocker.metadata;
    println!(
        "blocker-invasive n=256: {} rounds, {} insertions, {} segments",
        blocker.horizon(),
        blocker.insertions.len(),
        meta.segments.len()
    );
    for seg in meta.segments.iter().take(3) {
        println!(
            "  phase {} segment {}: rounds {}..={}, inner {:?}",
            seg.phase, seg.segment, seg.first_round, seg.last_round, seg.inner
        );
    }

    let skb = build_skb_adversary(&SkbAdversaryParams::new(512, 1)).unwrap();
    println!(
        "skb n=512: {} rounds, {} blocker sets, {} sentinel tokens",
        skb.horizon(),
        skb.metadata.blocker_groups.len(),
        skb.metadata.sentinel_tokens.len()
    );

    let random = build_random_interval_connected(10, 0.1, 3, 5).unwrap();
    let text = dgs::export_schedule(&random);
    print!("random n=10, first lines of DGS1:\n{}", text.lines().take(4).map(|l| format!("  {l}\n")).collect::<String>());
    let back = dgs::import_schedule(&text).unwrap();
    println!("round trip identical: {}", back.same_content(&random));
}
