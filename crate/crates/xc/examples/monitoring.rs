//! Monitors of a critical situation among moving devices, written to
//! `monitoring.csv` in the working directory.

use std::path::Path;

use xc::netsim::KeyValues;
use xc::scenarios::{export_csv, Scenario};

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/monitoring.cfg"
    ))
    .unwrap();
    let s = Scenario::from_config(&KeyValues::parse(&text).unwrap(), None).unwrap();
    println!("critic is device {}", s.critic.device);
    let run = s.run().unwrap();
    let cols: Vec<_> = run.series.iter().map(|(n, s)| (n.as_str(), s)).collect();
    println!(
        "time  {}",
        cols.iter()
            .map(|(n, _)| format!("{n:>21}"))
            .collect::<String>()
    );
    for i in (0..cols[0].1.len()).step_by(10) {
        let row: String = cols
            .iter()
            .map(|(_, s)| format!("{:>21.3}", s.values[i]))
            .collect();
        println!("{:4.0}  {row}", cols[0].1.times[i]);
    }
    export_csv(&cols, Path::new("monitoring.csv")).unwrap();
    println!("wrote monitoring.csv");
}
