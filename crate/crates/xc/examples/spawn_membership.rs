//! Two overlapping processes on a small hand-built event structure: which
//! events take part in each, with a hop limit of 2 and 1.

use std::collections::BTreeMap;

use xc::oracles::fixtures::Overlapping;
use xc::oracles::oracle_membership;
use xc::NValue;

fn main() {
    let fx = Overlapping::new();
    let preds = fx.structure.predecessors();
    let mut hops: BTreeMap<(i64, usize), i64> = BTreeMap::new();
    let table = oracle_membership(
        &fx.structure,
        |e| fx.generated(e).into_iter().collect(),
        |&k, e| {
            let h = if fx.generated(e).contains(&k) {
                0
            } else {
                preds[e]
                    .iter()
                    .filter_map(|&p| hops.get(&(k, p)))
                    .min()
                    .unwrap()
                    + 1
            };
            hops.insert((k, e), h);
            NValue::local((h <= Overlapping::hop_limit(k)).into())
        },
    )
    .unwrap();
    for key in [5001, 2001] {
        let events: Vec<String> = table
            .iter()
            .filter(|((k, _), &on)| *k == key && on)
            .map(|((_, e), _)| {
                let (d, r) = fx.labels[*e];
                format!("{d}/{r}")
            })
            .collect();
        println!("process {key}: {}", events.join(" "));
    }
}
