//! One message spreading as a sphere over a static network.

use xc::netsim::KeyValues;
use xc::scenarios::{delivery_time, Scenario};

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/sphere.cfg"
    ))
    .unwrap();
    let s = Scenario::from_config(&KeyValues::parse(&text).unwrap(), None).unwrap();
    let run = s.run().unwrap();
    let m = &run.messages[0];
    println!("message {} -> {} created at {:.2}", m.from, m.to, m.created);
    println!("delivered at {:?}", delivery_time(&run.trace, m));
    let a = run.series("aproc").unwrap();
    for (t, v) in a.times.iter().zip(&a.values).step_by(4) {
        println!("{t:5.1} {v:.3} {}", "#".repeat((v * 50.0) as usize));
    }
}
