//! The run loop: schedule, move, gather, evaluate, store.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xc_core::{evaluate, DeviceId, Expr, LocalValue, NValue, SensorState, TreeEnv, ValueTree};

use crate::config::{ConfigError, Placement, SimConfig};
use crate::geometry::{neighbours_of, uniform_positions, MobilityState, Point};
use crate::schedule::{schedule, Slot};
use crate::trace::{Event, EventStructure, Outcome, Trace};

const PLACEMENT_STREAM: u64 = 0;
const MOBILITY_STREAM: u64 = 2;

/// A seeded generator for one independent use of the run seed.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// What a sensor plugin knows about the round being prepared.
#[derive(Debug, Clone, Copy)]
pub struct SenseContext<'a> {
    pub event: usize,
    pub device: DeviceId,
    pub time: f64,
    pub round: u64,
    pub position: Point,
    /// Devices whose trees the round receives, the device itself included
    /// from its second round.
    pub env: &'a [DeviceId],
}

/// Scenario-specific sensors, filled in before every round.
pub trait SensorPlugin {
    fn sense(&mut self, ctx: &SenseContext<'_>, sensors: &mut SensorState);

    /// Called with the outcome of every round.
    fn observe(&mut self, _ctx: &SenseContext<'_>, _outcome: &Outcome) {}
}

/// No extra sensors.
pub struct NoSensors;

impl SensorPlugin for NoSensors {
    fn sense(&mut self, _: &SenseContext<'_>, _: &mut SensorState) {}
}

impl<F: FnMut(&SenseContext<'_>, &mut SensorState)> SensorPlugin for F {
    fn sense(&mut self, ctx: &SenseContext<'_>, sensors: &mut SensorState) {
        self(ctx, sensors)
    }
}

#[derive(Debug, Clone)]
struct Stored {
    tree: ValueTree,
    time: f64,
    event: usize,
}

/// Latest successful tree of every device. Devices pick up from it at the
/// start of their rounds, skipping entries older than the retention.
#[derive(Debug, Clone, Default)]
pub struct MessageStore {
    latest: BTreeMap<DeviceId, Stored>,
}

impl MessageStore {
    pub fn put(&mut self, d: DeviceId, tree: ValueTree, time: f64, event: usize) {
        self.latest.insert(d, Stored { tree, time, event });
    }

    /// Tree of `from` as seen at `now`, with the event that produced it.
    pub fn fetch(&self, from: DeviceId, now: f64, retention: f64) -> Option<(&ValueTree, usize)> {
        self.latest
            .get(&from)
            .filter(|s| now - s.time <= retention)
            .map(|s| (&s.tree, s.event))
    }

    /// The device's own latest tree, regardless of age.
    pub fn own(&self, d: DeviceId) -> Option<(&ValueTree, usize)> {
        self.latest.get(&d).map(|s| (&s.tree, s.event))
    }
}

/// Initial positions of all devices.
pub fn initial_positions(cfg: &SimConfig) -> Vec<Point> {
    match &cfg.placement {
        Placement::Explicit(p) => p.clone(),
        Placement::Uniform { .. } => {
            let mut rng = rng_stream(cfg.seed, PLACEMENT_STREAM);
            uniform_positions(cfg.devices, cfg.bounds(), &mut rng)
        }
    }
}

/// Relational sensors every round gets: distances and ids of the devices in
/// its environment.
pub fn standard_sensors(
    d: DeviceId,
    time: f64,
    positions: &[Point],
    env: &[DeviceId],
) -> SensorState {
    let here = positions[d.0 as usize];
    let mut dist = NValue::local(LocalValue::Real(f64::INFINITY));
    let mut ids = NValue::local(LocalValue::Unit);
    for &o in env {
        let r = if o == d {
            0.0
        } else {
            here.dist(&positions[o.0 as usize])
        };
        dist.set(o, LocalValue::Real(r));
        ids.set(o, LocalValue::Device(o));
    }
    let mut s = SensorState::at_time(time)
        .with_relational("nbr_dist", dist)
        .with_relational("nbr_uid", ids);
    s.scalars.insert(
        "position".into(),
        LocalValue::Pair(std::sync::Arc::new((
            LocalValue::Real(here.x),
            LocalValue::Real(here.y),
        ))),
    );
    s
}

/// Runs `program` on every device of the network described by `cfg`.
pub fn run(
    cfg: &SimConfig,
    program: &Expr,
    plugin: &mut dyn SensorPlugin,
) -> Result<Trace, ConfigError> {
    cfg.validate()?;
    let mut positions = initial_positions(cfg);
    let slots = schedule(cfg);
    let mut mob_rng = rng_stream(cfg.seed, MOBILITY_STREAM);
    let mut mobility = MobilityState::new(cfg, &mut mob_rng);

    let mut store = MessageStore::default();
    let mut trace = Trace::default();
    let mut clock = 0.0;
    for Slot {
        device,
        time,
        round,
    } in slots
    {
        if let Some(m) = mobility.as_mut() {
            if time > clock {
                m.advance(&mut positions, time - clock, &mut mob_rng);
            }
        }
        clock = time;
        let d = DeviceId(device as u64);
        let id = trace.structure.events.len();

        let mut env = TreeEnv::new();
        let mut edges = Vec::new();
        if let Some((tree, ev)) = store.own(d) {
            env.insert(d, tree.clone());
            edges.push(ev);
        }
        for n in neighbours_of(&positions, device, cfg.range) {
            let from = DeviceId(n as u64);
            if let Some((tree, ev)) = store.fetch(from, time, cfg.retention) {
                env.insert(from, tree.clone());
                edges.push(ev);
            }
        }
        edges.sort_unstable();
        let domain: Vec<DeviceId> = env.keys().copied().collect();

        let ctx = SenseContext {
            event: id,
            device: d,
            time,
            round,
            position: positions[device],
            env: &domain,
        };
        let mut sensors = standard_sensors(d, time, &positions, &domain);
        plugin.sense(&ctx, &mut sensors);

        let outcome = match evaluate(d, &env, &sensors, program) {
            Ok((value, tree)) => {
                store.put(d, tree.clone(), time, id);
                Outcome::Done { value, tree }
            }
            Err(e) => {
                log::debug!("event {id} on {d} at {time} failed: {e}");
                Outcome::Failed(e)
            }
        };
        plugin.observe(&ctx, &outcome);

        let s: &mut EventStructure = &mut trace.structure;
        s.events.push(Event {
            id,
            device: d,
            time,
            round,
        });
        s.edges.extend(edges.into_iter().map(|src| (src, id)));
        s.sensors.push(sensors);
        trace.outcomes.push(outcome);
    }
    Ok(trace)
}
