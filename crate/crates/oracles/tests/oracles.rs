use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use xc_core::{evaluate, DeviceId, LocalValue, NValue, SensorState, TreeEnv};
use xc_netsim::{rng_stream, run, EventStructure, NoSensors, Point, SenseContext, SimConfig};
use xc_oracles::fixtures::Overlapping;
use xc_oracles::{
    causal_order, disagreements, oracle_denotational, oracle_membership, oracle_shortest_paths,
    OracleError,
};

fn set_of(keys: &[i64]) -> LocalValue {
    LocalValue::Set(Arc::new(keys.iter().map(|&k| LocalValue::Int(k)).collect()))
}

fn int_keys<'a>(keys: impl Iterator<Item = &'a LocalValue>) -> BTreeSet<i64> {
    keys.map(|k| match k {
        LocalValue::Int(i) => *i,
        other => panic!("unexpected key {other}"),
    })
    .collect()
}

fn members(
    table: &BTreeMap<(i64, usize), bool>,
    key: i64,
    fx: &Overlapping,
) -> BTreeSet<(u64, u64)> {
    table
        .iter()
        .filter(|((k, _), &on)| *k == key && on)
        .map(|((_, e), _)| fx.labels[*e])
        .collect()
}

#[rustfmt::skip]
fn expected_5001() -> BTreeSet<(u64, u64)> {
    BTreeSet::from([
        (1, 2), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (3, 4), (4, 2),
        (4, 3), (4, 4), (4, 5), (4, 6), (5, 1), (5, 2), (5, 3),
    ])
}

fn expected_2001() -> BTreeSet<(u64, u64)> {
    BTreeSet::from([(1, 2), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 3)])
}

/// Membership with a hop-limited status: an instance keeps spreading while
/// the event is within its hop limit from the initiator.
fn hop_membership(fx: &Overlapping) -> BTreeMap<(i64, usize), bool> {
    let s = &fx.structure;
    let preds = s.predecessors();
    let mut hops: BTreeMap<(i64, usize), i64> = BTreeMap::new();
    oracle_membership(
        s,
        |e| fx.generated(e).into_iter().collect(),
        |&k, e| {
            let h = if fx.generated(e).contains(&k) {
                0
            } else {
                preds[e]
                    .iter()
                    .filter_map(|&p| hops.get(&(k, p)))
                    .min()
                    .expect("active event has an active predecessor")
                    + 1
            };
            hops.insert((k, e), h);
            NValue::local((h <= Overlapping::hop_limit(k)).into())
        },
    )
    .unwrap()
}

#[test]
fn overlapping_processes_membership() {
    let fx = Overlapping::new();
    assert!(xc_netsim::validate(&fx.structure).is_empty());
    let table = hop_membership(&fx);
    assert_eq!(members(&table, 5001, &fx), expected_5001());
    assert_eq!(members(&table, 2001, &fx), expected_2001());
    assert!(table[&(5001, fx.id(3, 4))]);
    assert!(!table[&(2001, fx.id(3, 4))]);
}

#[test]
fn overlapping_processes_via_spawn() {
    let fx = Overlapping::new();
    let program = xc_stdlib::compile(
        "spawn((k) => {
            val h = exchange(1000, (n) => {
                val x = mux(set_contains(sense(\"gen\"), k), 0, nfold(min, n, self(n)) + 1);
                pair(x, x)
            });
            pair(h, h <= mux(k == 5001, 2, 1))
        }, sense(\"gen\"))",
    )
    .unwrap();
    let mut s = fx.structure.clone();
    for (e, sensors) in s.sensors.iter_mut().enumerate() {
        sensors
            .scalars
            .insert("gen".into(), set_of(&fx.generated(e)));
    }
    let out = oracle_denotational(&s, &program).unwrap();
    let mut got: BTreeMap<i64, BTreeSet<(u64, u64)>> = BTreeMap::new();
    for (e, o) in out.iter().enumerate() {
        let LocalValue::Map(m) = o.value().unwrap().default_value() else {
            panic!("spawn returns a map");
        };
        for k in int_keys(m.keys()) {
            got.entry(k).or_default().insert(fx.labels[e]);
        }
    }
    assert_eq!(got[&5001], expected_5001());
    assert_eq!(got[&2001], expected_2001());
}

#[test]
fn no_generation_no_members() {
    let fx = Overlapping::new();
    let t = oracle_membership(
        &fx.structure,
        |_| BTreeSet::<i64>::new(),
        |_, _| unreachable!(),
    )
    .unwrap();
    assert!(t.values().all(|&b| !b));
}

#[test]
fn rejects_cycles() {
    let mut s = Overlapping::new().structure;
    s.edges.push((s.events.len() - 1, 0));
    assert_eq!(causal_order(&s), Err(OracleError::Cycle));
    let t = oracle_membership(
        &s,
        |_| BTreeSet::from([1]),
        |_, _| NValue::local(true.into()),
    );
    assert!(t.is_err());
}

fn causal_future(s: &EventStructure, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(i) = stack.pop() {
        for &(a, b) in &s.edges {
            if a == i && seen.insert(b) {
                stack.push(b);
            }
        }
    }
    seen
}

#[test]
fn always_true_status_fills_causal_future() {
    let fx = Overlapping::new();
    let start = fx.id(4, 1);
    let t = oracle_membership(
        &fx.structure,
        |e| {
            if e == start {
                BTreeSet::from([7])
            } else {
                BTreeSet::new()
            }
        },
        |_, _| NValue::local(true.into()),
    )
    .unwrap();
    let on: BTreeSet<usize> = t.iter().filter(|(_, &b)| b).map(|((_, e), _)| *e).collect();
    assert_eq!(on, causal_future(&fx.structure, start));
}

#[test]
fn shortest_paths() {
    let line = vec![
        vec![(1, 1.0)],
        vec![(0, 1.0), (2, 1.0)],
        vec![(1, 1.0)],
        vec![],
    ];
    assert_eq!(
        oracle_shortest_paths(&line, &[0]),
        vec![0.0, 1.0, 2.0, f64::INFINITY]
    );
    assert_eq!(
        oracle_shortest_paths(&line, &[0, 2]),
        vec![0.0, 1.0, 0.0, f64::INFINITY]
    );
    let tri = vec![
        vec![(1, 5.0), (2, 1.0)],
        vec![(0, 5.0), (2, 1.0)],
        vec![(0, 1.0), (1, 1.0)],
    ];
    assert_eq!(oracle_shortest_paths(&tri, &[0]), vec![0.0, 2.0, 1.0]);
}

#[test]
fn constant_program() {
    let fx = Overlapping::new();
    let out = oracle_denotational(&fx.structure, &xc_stdlib::compile("42").unwrap()).unwrap();
    assert!(out
        .iter()
        .all(|o| *o.value().unwrap() == NValue::local(42i64.into())));
}

fn chain(n: usize) -> EventStructure {
    EventStructure {
        events: (0..n)
            .map(|i| xc_netsim::Event {
                id: i,
                device: DeviceId(0),
                time: i as f64,
                round: i as u64 + 1,
            })
            .collect(),
        edges: (1..n).map(|i| (i - 1, i)).collect(),
        sensors: vec![SensorState::default(); n],
    }
}

#[test]
fn counter_on_a_chain() {
    let out = oracle_denotational(&chain(6), &xc_stdlib::compile("counter()").unwrap()).unwrap();
    let values: Vec<LocalValue> = out
        .iter()
        .map(|o| o.value().unwrap().default_value().clone())
        .collect();
    assert_eq!(values, (1..=6i64).map(LocalValue::from).collect::<Vec<_>>());
}

#[test]
fn failed_predecessor_contributes_nothing() {
    let mut s = chain(3);
    s.events[1].device = DeviceId(1);
    s.events[1].round = 1;
    s.events[2].round = 2;
    s.edges = vec![(0, 2), (1, 2)];
    s.sensors = [1i64, 0, 1]
        .iter()
        .map(|&x| SensorState::default().with_scalar("x", x))
        .collect();
    let p = xc_stdlib::compile("val y = div(1, sense(\"x\")); counter()").unwrap();
    let out = oracle_denotational(&s, &p).unwrap();
    assert!(out[1].value().is_none());
    let env = TreeEnv::from([(DeviceId(0), out[0].tree().unwrap().clone())]);
    let direct = evaluate(DeviceId(0), &env, &s.sensors[2], &p).unwrap();
    assert_eq!(out[2].value(), Some(&direct.0));
    assert_eq!(*direct.0.default_value(), LocalValue::Int(2));
}

fn random_config(seed: u64, n: usize) -> SimConfig {
    let mut rng = rng_stream(seed, 99);
    let points = (0..n)
        .map(|_| Point::new(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)))
        .collect();
    SimConfig {
        range: 1.5,
        duration: 6.0,
        jitter: 0.3,
        seed,
        ..SimConfig::default()
    }
    .with_positions(points)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn agrees_with_simulator(seed in 0u64..10_000, n in 1usize..6) {
        let cfg = random_config(seed, n);
        for src in ["counter()", "gradient(uid() == #0)", "ep(3 < sense(\"time\") and uid() == #1)"] {
            let p = xc_stdlib::compile(src).unwrap();
            let t = run(&cfg, &p, &mut NoSensors).unwrap();
            let o = oracle_denotational(&t.structure, &p).unwrap();
            prop_assert!(disagreements(&t.outcomes, &o).is_empty(), "{}", src);
        }
    }

    #[test]
    fn membership_matches_spawn(seed in 0u64..10_000, n in 1usize..6) {
        let cfg = random_config(seed, n);
        let p = xc_stdlib::compile(
            "spawn((k) => pair(k, nbr_sense(add(\"st\", text(k)))), sense(\"gen\"))",
        ).unwrap();
        let mut rng = rng_stream(seed, 7);
        let mut plugin = |ctx: &SenseContext<'_>, s: &mut SensorState| {
            let gen: Vec<i64> = (1..=2).filter(|_| rng.random_bool(0.15)).collect();
            s.scalars.insert("gen".into(), set_of(&gen));
            for k in 1..=2 {
                let mut w = NValue::local(rng.random_bool(0.5).into());
                for &d in ctx.env {
                    w.set(d, rng.random_bool(0.5).into());
                }
                s.relational.insert(format!("st{k}"), w);
            }
        };
        let t = run(&cfg, &p, &mut plugin).unwrap();
        let s = &t.structure;
        let gen_of = |e: usize| match s.sensors[e].scalar("gen") {
            Some(LocalValue::Set(ks)) => int_keys(ks.iter()),
            _ => BTreeSet::new(),
        };
        let table = oracle_membership(s, gen_of, |k, e| {
            s.sensors[e].relational(&format!("st{k}")).unwrap().clone()
        }).unwrap();
        for e in 0..s.events.len() {
            let LocalValue::Map(m) = t.value(e).unwrap().default_value() else {
                panic!("spawn returns a map");
            };
            let oracle: BTreeSet<i64> = table
                .iter()
                .filter(|((_, ev), &on)| *ev == e && on)
                .map(|((k, _), _)| *k)
                .collect();
            prop_assert_eq!(int_keys(m.keys()), oracle, "event {}", e);
        }
    }
}
