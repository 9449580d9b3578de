//! Evaluates a program round by round on one device, feeding each round the
//! value tree of the previous one.

use xc::{evaluate, DeviceId, SensorState, TreeEnv};

fn main() {
    let program = xc::stdlib::compile("pair(counter(), exchange(0, (n) => pair(n + 1, n + 1)))")
        .expect("program compiles");
    let me = DeviceId(0);
    let mut env = TreeEnv::new();
    for round in 1..=4 {
        let sensors = SensorState::default().with_scalar("time", round as f64);
        let (value, tree) = evaluate(me, &env, &sensors, &program).expect("evaluation succeeds");
        println!("round {round}: {value}");
        env = TreeEnv::from([(me, tree)]);
    }
}
