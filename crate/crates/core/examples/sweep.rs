//! A small scaling sweep and a blocker separation measurement.

use gossipsim::harness::{measure_blocker_separation, run_cell, sweep, ExperimentConfig, Trace};

fn main() {
    let config = ExperimentConfig::from_json(
        r#"{
            "adversary": {"name": "ring-failure", "params": {"policy": "random"}},
            "protocol": {"name": "rand-diff"},
            "initial": "one-token-per-node",
            "n": [16, 32, 64],
            "seeds": [0, 1, 2],
            "max_rounds": 50000
        }"#,
    )
    .unwrap();
    let report = sweep(&config).unwrap();
    print!("{}", report.summary.csv());
    println!("log-log slope {:.3}", report.summary.slope.unwrap_or(f64::NAN));

    let dir = std::env::temp_dir().join("gossipsim-sweep-example");
    let mut blocker = ExperimentConfig::from_json(
        r#"{
            "adversary": {"name": "blocker-invasive"},
            "protocol": {"name": "rand-diff"},
            "metric": "sentinel",
            "n": [256], "seeds": [0], "max_rounds": 2000
        }"#,
    )
    .unwrap();
    blocker.outputs.trace_dir = Some(dir.clone());
    let cell = run_cell(&blocker, 256, 0).unwrap();
    println!("blocker-invasive n=256: sentinel round {:?}", cell.sentinel_round.flatten());
    let trace = Trace::read(&dir.join("n256_seed0.gtr")).unwrap();
    let meta = serde_json::from_str(&std::fs::read_to_string(dir.join("n256_seed0.meta.json")).unwrap()).unwrap();
    let stats = measure_blocker_separation(&trace, &meta).unwrap();
    println!(
        "separation: {} of {} inner pairs below {:.2}",
        stats.below, stats.pairs, stats.threshold
    );
}
