//! Many generators sending messages at random; the mean number of live
//! processes per device over a few seeds.

use xc::netsim::KeyValues;
use xc::scenarios::{Scenario, TimeSeries};

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/multi.cfg"
    ))
    .unwrap();
    let mut series = Vec::new();
    for seed in 0..4 {
        let kv = KeyValues::parse(&format!("{text}\nseed = {seed}\n")).unwrap();
        let run = Scenario::from_config(&kv, None).unwrap().run().unwrap();
        println!("seed {seed}: {} messages", run.messages.len());
        series.push(run.series("aproc").unwrap().clone());
    }
    let mean = TimeSeries::mean(&series).unwrap();
    for (t, v) in mean.times.iter().zip(&mean.values).step_by(4) {
        println!("{t:5.1} {v:.3}");
    }
}
