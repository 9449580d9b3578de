//! Runs the gradient on a grid and compares it with shortest paths.

use xc::netsim::{neighbours, run, NoSensors, Point, SimConfig};
use xc::oracles::oracle_shortest_paths;
use xc::LocalValue;

fn main() {
    let side = 6;
    let points: Vec<Point> = (0..side * side)
        .map(|i| Point::new((i % side) as f64, (i / side) as f64))
        .collect();
    let cfg = SimConfig {
        range: 1.5,
        jitter: 0.2,
        duration: 30.0,
        seed: 1,
        ..SimConfig::default()
    }
    .with_positions(points.clone());
    let program = xc::stdlib::compile("gradient(uid() == #0)").unwrap();
    let trace = run(&cfg, &program, &mut NoSensors).unwrap();

    let mut last = vec![f64::NAN; points.len()];
    for e in trace.events() {
        if let Some(LocalValue::Real(r)) = trace.value(e.id).map(|v| v.default_value()) {
            last[e.device.0 as usize] = *r;
        }
    }
    let adj: Vec<Vec<(usize, f64)>> = neighbours(&points, cfg.range)
        .iter()
        .enumerate()
        .map(|(i, ns)| {
            ns.iter()
                .map(|&j| (j, points[i].dist(&points[j])))
                .collect()
        })
        .collect();
    let exact = oracle_shortest_paths(&adj, &[0]);
    for row in 0..side {
        let cells: Vec<String> = (0..side)
            .map(|c| format!("{:5.2}", last[row * side + c]))
            .collect();
        println!("{}", cells.join(" "));
    }
    let worst = last
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("largest difference from shortest paths: {worst}");
}
