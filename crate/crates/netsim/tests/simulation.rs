use std::collections::BTreeSet;

use proptest::prelude::*;
use xc_core::{DeviceId, LocalValue, SensorState};
use xc_netsim::{run, validate, NoSensors, Point, SenseContext, SimConfig, TraceFile};

fn line(n: usize, spacing: f64) -> Vec<Point> {
    (0..n)
        .map(|i| Point::new(i as f64 * spacing, 0.0))
        .collect()
}

fn prog(src: &str) -> xc_core::Expr {
    xc_stdlib::compile(src).unwrap()
}

#[test]
fn duration_zero_gives_empty_trace() {
    let cfg = SimConfig {
        duration: 0.0,
        ..SimConfig::default()
    };
    let t = run(&cfg, &prog("counter()"), &mut NoSensors).unwrap();
    assert!(t.events().is_empty());
    assert!(t.structure.edges.is_empty());
}

#[test]
fn isolated_device_counts_rounds() {
    let cfg = SimConfig {
        duration: 5.0,
        ..SimConfig::default()
    }
    .with_positions(vec![Point::new(0.0, 0.0)]);
    let t = run(&cfg, &prog("counter()"), &mut NoSensors).unwrap();
    let values: Vec<_> = (0..t.events().len())
        .map(|i| t.value(i).unwrap().default_value().clone())
        .collect();
    let expected: Vec<LocalValue> = (1..=5i64).map(LocalValue::from).collect();
    assert_eq!(values, expected);
    assert_eq!(t.structure.edges, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
}

#[test]
fn edges_follow_environment() {
    let cfg = SimConfig {
        duration: 6.0,
        range: 1.0,
        jitter: 0.1,
        seed: 4,
        ..SimConfig::default()
    }
    .with_positions(line(4, 1.0));
    let t = run(&cfg, &prog("gradient(uid() == #0)"), &mut NoSensors).unwrap();
    assert!(validate(&t.structure).is_empty());
    let preds = t.structure.predecessors();
    for (i, e) in t.events().iter().enumerate() {
        let from: BTreeSet<DeviceId> = preds[i].iter().map(|&p| t.events()[p].device).collect();
        let env: BTreeSet<DeviceId> = t.structure.sensors[i]
            .relational("nbr_uid")
            .unwrap()
            .domain()
            .collect();
        assert_eq!(from, env, "event {i} on {}", e.device);
        for d in &from {
            assert!(d.0.abs_diff(e.device.0) <= 1);
        }
    }
}

#[test]
fn gradient_on_a_line() {
    let cfg = SimConfig {
        duration: 8.0,
        range: 1.0,
        ..SimConfig::default()
    }
    .with_positions(line(3, 1.0));
    let t = run(&cfg, &prog("gradient(uid() == #0)"), &mut NoSensors).unwrap();
    let last: Vec<_> = t.events()[t.events().len() - 3..]
        .iter()
        .map(|e| t.value(e.id).unwrap().default_value().clone())
        .collect();
    assert_eq!(
        last,
        vec![
            LocalValue::Real(0.0),
            LocalValue::Real(1.0),
            LocalValue::Real(2.0)
        ]
    );
}

#[test]
fn expired_sender_contributes_no_edge() {
    // Device 1 fails between t=2 and t=6, so its stored tree ages past the
    // retention and device 0 stops hearing from it.
    let cfg = SimConfig {
        duration: 9.0,
        range: 1.0,
        ..SimConfig::default()
    }
    .with_positions(line(2, 1.0));
    let program = prog("val x = div(1, mux(sense(\"down\"), 0, 1)); counter()");
    let mut plugin = |ctx: &SenseContext<'_>, s: &mut SensorState| {
        let down = ctx.device == DeviceId(1) && (2.0..=6.0).contains(&ctx.time);
        s.scalars.insert("down".into(), down.into());
    };
    let t = run(&cfg, &program, &mut plugin).unwrap();
    assert!(validate(&t.structure).is_empty());
    let preds = t.structure.predecessors();
    let hears_one = |time: f64| {
        let e = t
            .events()
            .iter()
            .find(|e| e.device == DeviceId(0) && e.time == time)
            .unwrap();
        preds[e.id]
            .iter()
            .any(|&p| t.events()[p].device == DeviceId(1))
    };
    // Last successful tree of device 1 is from t=1.
    assert!(hears_one(2.0));
    assert!(hears_one(3.0));
    assert!(!hears_one(4.0));
    assert!(!hears_one(6.0));
    assert!(hears_one(8.0));
    let failed = t.outcomes.iter().filter(|o| o.value().is_none()).count();
    assert_eq!(failed, 5);
}

#[test]
fn trace_export_is_deterministic_and_parses() {
    let cfg = SimConfig {
        devices: 8,
        duration: 6.0,
        jitter: 0.1,
        seed: 11,
        mobility: xc_netsim::Mobility::RandomWalk { speed: 5.0 },
        ..SimConfig::default()
    };
    let p = prog("pair(counter(), gradient(uid() == #3))");
    let a = run(&cfg, &p, &mut NoSensors).unwrap().export();
    let b = run(&cfg, &p, &mut NoSensors).unwrap().export();
    assert_eq!(a, b);
    let f = TraceFile::parse(&a).unwrap();
    assert!(validate(&f.structure()).is_empty());
    let other = SimConfig { seed: 12, ..cfg };
    assert_ne!(a, run(&other, &p, &mut NoSensors).unwrap().export());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_are_valid(seed in 0u64..1000, n in 1usize..7, range in 10.0f64..80.0) {
        let cfg = SimConfig { devices: n, range, duration: 5.0, jitter: 0.2, seed, ..SimConfig::default() };
        let t = run(&cfg, &prog("counter()"), &mut NoSensors).unwrap();
        prop_assert!(validate(&t.structure).is_empty());
    }

    #[test]
    fn shorter_retention_never_adds_edges(seed in 0u64..1000, retention in 1.0f64..4.0) {
        let cfg = SimConfig { devices: 6, range: 40.0, duration: 8.0, jitter: 0.3, seed, retention: 4.0, ..SimConfig::default() };
        let program = prog("val x = div(1, mux(sense(\"down\"), 0, 1)); counter()");
        // Failures make stored trees age irregularly.
        let plugin = || move |ctx: &SenseContext<'_>, s: &mut SensorState| {
            let down = (ctx.device.0 + ctx.round).is_multiple_of(3);
            s.scalars.insert("down".into(), down.into());
        };
        let long = run(&cfg, &program, &mut plugin()).unwrap();
        let short = run(&SimConfig { retention, ..cfg }, &program, &mut plugin()).unwrap();
        let long_edges: BTreeSet<_> = long.structure.edges.iter().collect();
        for e in &short.structure.edges {
            prop_assert!(long_edges.contains(e));
        }
    }
}
