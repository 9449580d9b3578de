use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use xc_core::{DeviceId, LocalValue, NValue};
use xc_netsim::KeyValues;
use xc_oracles::oracle_membership;
use xc_scenarios::*;

fn scenario(text: &str) -> Scenario {
    Scenario::from_config(&KeyValues::parse(text).unwrap(), None).unwrap()
}

fn active_keys(run: &ScenarioRun, e: usize) -> BTreeSet<LocalValue> {
    match run.trace.value(e).map(|v| v.default_value()) {
        Some(LocalValue::Map(m)) => m.keys().cloned().collect(),
        _ => BTreeSet::new(),
    }
}

fn devices_running(run: &ScenarioRun, key: &LocalValue) -> BTreeSet<u64> {
    run.trace
        .events()
        .iter()
        .filter(|e| active_keys(run, e.id).contains(key))
        .map(|e| e.device.0)
        .collect()
}

const LINE: &str = "positions = 0,0; 1,0; 2,0; 3,0; 4,0\nrange = 1.1\nduration = 30\n";

#[test]
fn sphere_on_a_line_delivers_and_vanishes() {
    let r = scenario(&format!("scenario = sphere\n{LINE}gen.time = 3\n"))
        .run()
        .unwrap();
    assert_eq!(r.messages.len(), 1);
    let m = &r.messages[0];
    assert_eq!((m.from, m.to, m.created), (DeviceId(0), DeviceId(4), 3.0));
    // Simultaneous rounds run in device order, so the wave crosses the
    // whole line within one slot.
    assert_eq!(delivery_time(&r.trace, m), Some(3.0));
    assert_eq!(devices_running(&r, &m.key()), (0..5).collect());
    let a = r.series("aproc").unwrap();
    for (t, v) in a.times.iter().zip(&a.values) {
        if *t < 3.0 || *t >= 10.0 {
            assert_eq!(*v, 0.0, "t = {t}");
        }
    }
    assert!(a.max() > 0.0);
}

#[test]
fn sphere_target_does_not_forward() {
    let r = scenario(&format!(
        "scenario = sphere\n{LINE}gen.time = 3\ngen.to = 2\n"
    ))
    .run()
    .unwrap();
    let key = r.messages[0].key();
    assert_eq!(devices_running(&r, &key), BTreeSet::from([0, 1, 2]));
}

#[test]
fn disconnected_target_never_receives() {
    let r = scenario("scenario = sphere\npositions = 0,0; 1,0; 9,0\nrange = 1.1\nduration = 20\n")
        .run()
        .unwrap();
    assert_eq!(r.messages[0].to, DeviceId(2));
    assert_eq!(delivery_time(&r.trace, &r.messages[0]), None);
}

#[test]
fn tree_routes_along_the_tree() {
    // 0 - 1 - 2 with a side branch 1 - 3.
    let text = "scenario = tree\npositions = 0,0; 1,0; 2,0; 1,1\nrange = 1.1\nduration = 40\n\
                tree.root = 0\ngen.from = 2\ngen.to = 0\ngen.time = 10\n";
    let r = scenario(text).run().unwrap();
    let m = &r.messages[0];
    let t = delivery_time(&r.trace, m).expect("delivered");
    assert!(t >= m.created);
    assert_eq!(devices_running(&r, &m.key()), BTreeSet::from([0, 1, 2]));

    let sphere = scenario(&text.replace("scenario = tree", "scenario = sphere"))
        .run()
        .unwrap();
    assert_eq!(
        devices_running(&sphere, &sphere.messages[0].key()),
        (0..4).collect()
    );
}

#[test]
fn tree_sends_down_the_tree_too() {
    let text = "scenario = tree\npositions = 0,0; 1,0; 2,0; 1,1\nrange = 1.1\nduration = 40\n\
                tree.root = 0\ngen.from = 2\ngen.to = 3\ngen.time = 10\n";
    let r = scenario(text).run().unwrap();
    let m = &r.messages[0];
    assert!(delivery_time(&r.trace, m).is_some());
    assert!(!devices_running(&r, &m.key()).contains(&0));
}

#[test]
fn multi_keys_carry_generator_and_round() {
    let r = scenario("scenario = multi\ndevices = 30\nwidth = 200\nheight = 200\nrange = 60\nduration = 40\ngen.prob = 0.3\nseed = 2\n")
        .run()
        .unwrap();
    assert!(!r.messages.is_empty());
    for m in &r.messages {
        assert!(m.from.0 < 10 && m.from != m.to);
        assert!((1.0..=25.0).contains(&m.created));
        let LocalValue::Int(round) = m.payload else {
            panic!()
        };
        assert!(round >= 1);
        assert_eq!(Message::from_key(&m.key()).as_ref(), Some(m));
    }
    assert!(r.series("aproc").unwrap().at(40.0).unwrap() < r.series("aproc").unwrap().max());
}

#[test]
fn monitors_stay_false_before_the_critic() {
    let r = scenario(
        "scenario = monitoring\ndevices = 20\nwidth = 200\nheight = 200\nrange = 80\n\
         duration = 40\nmobility = random_walk\nspeed = 5\njitter = 0.1\nseed = 1\n\
         critic.start = 10\ncritic.end = 12\n",
    )
    .run()
    .unwrap();
    let names: Vec<&str> = r.series.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, MONITORS);
    for (_, s) in &r.series {
        for (t, v) in s.times.iter().zip(&s.values) {
            assert!((0.0..=1.0).contains(v));
            if *t < 10.0 {
                assert_eq!(*v, 0.0);
            }
        }
    }
    let ever = r.series("ever_critic").unwrap();
    assert!(ever.values.windows(2).all(|w| w[0] <= w[1]));
    assert!(ever.max() > 0.5);
    assert!(r.series("critic").unwrap().max() <= 1.0 / 20.0);
}

#[test]
fn gradient_scenario_reports_mean_distance() {
    let r = scenario(&format!("scenario = gradient\n{LINE}"))
        .run()
        .unwrap();
    let mean = r.series("mean").unwrap();
    assert_eq!(mean.at(30.0), Some((0.0 + 1.0 + 2.0 + 3.0 + 4.0) / 5.0));
}

#[test]
fn custom_scenario_needs_a_valid_program() {
    let mut s = scenario("scenario = custom\n");
    assert!(matches!(s.run(), Err(ScenarioError::MissingProgram)));
    s.program = Some("nope + 1".into());
    assert!(matches!(s.run(), Err(ScenarioError::Program(_))));
    s.program = Some("counter()".into());
    let r = s.run().unwrap();
    assert_eq!(r.series("mean").unwrap().at(10.0), Some(10.0));
}

#[test]
fn config_errors() {
    let parse = |t: &str| Scenario::from_config(&KeyValues::parse(t).unwrap(), None);
    assert!(matches!(
        parse("scenario = bogus"),
        Err(ScenarioError::UnknownScenario(_))
    ));
    assert!(matches!(
        parse("devices = 3\ngen.from = 5"),
        Err(ScenarioError::Config(_))
    ));
    assert!(parse("scenario = multi\ndevices = 5").is_err());
    assert!(parse("scenario = monitoring\nmonitor.replicas = 1").is_err());
    assert!(parse("clock = sundial").is_err());
    assert!(parse("sample.dt = 0").is_err());
    assert!(parse("propagation.offer_rounds = 0").is_err());
    let kv = KeyValues::parse("scenario = bogus").unwrap();
    assert_eq!(
        Scenario::from_config(&kv, Some(Kind::Tree)).unwrap().kind,
        Kind::Tree
    );
    for k in Kind::ALL {
        assert_eq!(k.name().parse::<Kind>().unwrap(), k);
    }
}

#[test]
fn csv_header_only_for_empty_series() {
    let empty = TimeSeries {
        times: vec![],
        values: vec![],
    };
    let mut out = Vec::new();
    write_csv(&[("aproc", &empty)], &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "time,aproc\n");
}

#[test]
fn csv_columns_follow_argument_order() {
    let a = TimeSeries {
        times: vec![0.0, 0.5],
        values: vec![1.0, 2.0],
    };
    let b = TimeSeries {
        times: vec![0.0, 0.5],
        values: vec![3.0, 4.0],
    };
    let mut out = Vec::new();
    write_csv(&[("b", &b), ("a", &a)], &mut out).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "time,b,a\n0,3,1\n0.5,4,2\n"
    );
    let c = TimeSeries {
        times: vec![0.0],
        values: vec![1.0],
    };
    assert!(matches!(
        write_csv(&[("a", &a), ("c", &c)], Vec::new()),
        Err(CsvError::Mismatch)
    ));
}

#[test]
fn csv_to_unwritable_path_fails() {
    let a = TimeSeries {
        times: vec![0.0],
        values: vec![1.0],
    };
    assert!(export_csv(&[("a", &a)], std::path::Path::new("/nonexistent/dir/m.csv")).is_err());
}

proptest! {
    #[test]
    fn csv_round_trips_exactly(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 0..20)) {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.5).collect();
        let s = TimeSeries { times, values };
        let twice = TimeSeries { times: s.times.clone(), values: s.values.iter().map(|v| v / 3.0).collect() };
        let mut out = Vec::new();
        write_csv(&[("x", &s), ("y", &twice)], &mut out).unwrap();
        let back = read_csv(&out[..]).unwrap();
        prop_assert_eq!(back.len(), 2);
        prop_assert_eq!(&back[0].1, &s);
        prop_assert_eq!(&back[1].1, &twice);
    }
}

/// Status of the sphere process, stated directly: during the first
/// `offer_rounds` rounds of a device's first stretch of activity for an instance, it asks
/// every device that has not sent it the instance to join; otherwise, and
/// at the destination, it asks nobody.
fn sphere_membership_matches_oracle(text: &str) {
    let sc = scenario(text);
    let r = sc.run().unwrap();
    let s = &r.trace.structure;
    let preds = s.predecessors();
    let own_prev = |e: usize| {
        preds[e]
            .iter()
            .copied()
            .find(|&p| s.events[p].device == s.events[e].device)
    };
    let generated = |e: usize| match s.sensors[e].scalar("messages") {
        Some(LocalValue::Set(ks)) => ks.iter().cloned().collect(),
        _ => BTreeSet::new(),
    };
    // Per active (key, event): rounds into the current stretch, and whether
    // this is the device's first stretch.
    let mut stretch: BTreeMap<(LocalValue, usize), (u32, bool)> = BTreeMap::new();
    let mut left: BTreeSet<(LocalValue, DeviceId)> = BTreeSet::new();
    let table = oracle_membership(s, generated, |k, e| {
        let dev = s.events[e].device;
        let (rounds, first) = match own_prev(e).and_then(|p| stretch.get(&(k.clone(), p))) {
            Some(&(n, f)) => (n + 1, f),
            None => (1, !left.contains(&(k.clone(), dev))),
        };
        stretch.insert((k.clone(), e), (rounds, first));
        left.insert((k.clone(), dev));
        let to = Message::from_key(k).unwrap().to;
        if dev == to || !first || rounds > sc.offer_rounds {
            return NValue::local(false.into());
        }
        let mut w = NValue::local(true.into());
        for &p in &preds[e] {
            let d = s.events[p].device;
            if d != dev && stretch.contains_key(&(k.clone(), p)) {
                w.set(d, false.into());
            }
        }
        w
    })
    .unwrap();
    for e in 0..s.events.len() {
        let oracle: BTreeSet<LocalValue> = table
            .iter()
            .filter(|((_, ev), &on)| *ev == e && on)
            .map(|((k, _), _)| k.clone())
            .collect();
        assert_eq!(active_keys(&r, e), oracle, "event {e}");
    }
}

#[test]
fn sphere_membership_equals_oracle() {
    for offer in [1, 2, 3] {
        sphere_membership_matches_oracle(&format!(
            "scenario = sphere\ndevices = 25\nwidth = 100\nheight = 100\nrange = 35\njitter = 0.2\n\
             duration = 30\nseed = 3\npropagation.offer_rounds = {offer}\n"
        ));
        sphere_membership_matches_oracle(&format!(
            "scenario = multi\ndevices = 20\nwidth = 100\nheight = 100\nrange = 35\njitter = 0.2\n\
             duration = 40\ngen.prob = 0.2\nseed = 5\npropagation.offer_rounds = {offer}\n"
        ));
    }
}

#[test]
fn second_offer_round_survives_a_fast_neighbour() {
    let cfg = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/tree.cfg"
    ))
    .unwrap();
    let delivered = |offer: u32| {
        let r = scenario(&format!(
            "{cfg}\nseed = 3\npropagation.offer_rounds = {offer}\n"
        ))
        .run()
        .unwrap();
        delivery_time(&r.trace, &r.messages[0])
    };
    assert_eq!(delivered(1), None);
    assert!(delivered(2).is_some());
}
