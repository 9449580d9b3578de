//! The same message routed along a spanning tree and spread as a sphere,
//! with devices forwarding during their first one or two rounds.

use xc::netsim::KeyValues;
use xc::scenarios::{delivery_time, Scenario};

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/tree.cfg"
    ))
    .unwrap();
    for (kind, offer) in [("tree", 1), ("sphere", 1), ("tree", 2), ("sphere", 2)] {
        let kv = KeyValues::parse(&format!(
            "{text}\nscenario = {kind}\npropagation.offer_rounds = {offer}\n"
        ))
        .unwrap();
        let run = Scenario::from_config(&kv, None).unwrap().run().unwrap();
        let a = run.series("aproc").unwrap();
        println!(
            "{kind:6} offering {offer} round(s): peak aproc {:.4}, delivered at {:?}",
            a.max(),
            delivery_time(&run.trace, &run.messages[0])
        );
    }
}
