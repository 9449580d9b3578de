//! Exports a trace, reads it back, checks its structure, and re-evaluates
//! every event directly on the recorded structure.

use xc::netsim::{run, validate, SimConfig, TraceFile};
use xc::oracles::{disagreements, oracle_denotational};

fn main() {
    let cfg = SimConfig {
        devices: 12,
        range: 40.0,
        jitter: 0.3,
        duration: 15.0,
        seed: 9,
        ..SimConfig::default()
    };
    let program = xc::stdlib::compile("pair(gradient(uid() == #0), ep(uid() == #3))").unwrap();
    let trace = run(&cfg, &program, &mut xc::netsim::NoSensors).unwrap();
    let text = trace.export();
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));

    let file = TraceFile::parse(&text).unwrap();
    println!("{} events, {} edges", file.events.len(), file.edges.len());
    println!("violations: {:?}", validate(&file.structure()));

    let direct = oracle_denotational(&trace.structure, &program).unwrap();
    println!(
        "events disagreeing with direct evaluation: {:?}",
        disagreements(&trace.outcomes, &direct)
    );
}
