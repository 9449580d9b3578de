//! Scenario configuration, sensors, and runs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use xc_core::{DeviceId, Expr, LocalValue, SensorState};
use xc_lang::Diagnostic;
use xc_netsim::{
    initial_positions, rng_stream, run, sim_config, ConfigError, KeyValues, SenseContext,
    SensorPlugin, SimConfig, Trace,
};
use xc_stdlib::LinkOptions;

use crate::message::Message;
use crate::metrics::{aproc, mean_output, truth_fraction, TimeSeries};
use crate::programs::{self, MonitorParams};

const GENERATION_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Sphere,
    Tree,
    Multi,
    Monitoring,
    Gradient,
    Custom,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Sphere,
        Kind::Tree,
        Kind::Multi,
        Kind::Monitoring,
        Kind::Gradient,
        Kind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Sphere => "sphere",
            Kind::Tree => "tree",
            Kind::Multi => "multi",
            Kind::Monitoring => "monitoring",
            Kind::Gradient => "gradient",
            Kind::Custom => "custom",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ScenarioError::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("the custom scenario needs a program")]
    MissingProgram,
    #[error("program has errors")]
    Program(Vec<Diagnostic>),
}

/// Where and when propagation messages appear.
#[derive(Debug, Clone, PartialEq)]
pub enum Generation {
    None,
    /// One message from `from` to `to`, at the first round of `from` at or
    /// after `time`.
    Single {
        from: DeviceId,
        to: DeviceId,
        time: f64,
    },
    /// Every round of each generator within `[start, end]` creates a message
    /// with probability `prob`, to a uniformly drawn other device.
    Random {
        generators: Vec<DeviceId>,
        prob: f64,
        start: f64,
        end: f64,
    },
}

/// Interval during which one device is critic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Critic {
    pub device: DeviceId,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: Kind,
    pub sim: SimConfig,
    pub generation: Generation,
    pub root: DeviceId,
    pub critic: Critic,
    pub source: DeviceId,
    pub monitor: MonitorParams,
    pub link: LinkOptions,
    /// Rounds during which a device forwards a message it just received.
    pub offer_rounds: u32,
    /// Sampling interval of the metrics.
    pub dt: f64,
    /// Program text for the custom scenario.
    pub program: Option<String>,
}

fn value_err(key: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(ConfigError::Value {
        key: key.into(),
        message: message.into(),
    })
}

impl Scenario {
    /// Reads a scenario from configuration pairs. `scenario` overrides the
    /// `scenario` key.
    pub fn from_config(kv: &KeyValues, scenario: Option<Kind>) -> Result<Self, ScenarioError> {
        let kind = match scenario {
            Some(k) => k,
            None => kv.get("scenario").unwrap_or("sphere").parse()?,
        };
        let sim = sim_config(kv)?;
        let n = sim.devices as u64;
        let device = |key: &str, default: u64| -> Result<DeviceId, ScenarioError> {
            let d: u64 = kv.get_or(key, default)?;
            if d >= n.max(1) {
                return Err(value_err(key, format!("no device {d} among {n}")));
            }
            Ok(DeviceId(d))
        };
        let generation = match kind {
            Kind::Sphere | Kind::Tree => {
                let from = device("gen.from", 0)?;
                let to = match kv.get("gen.to") {
                    Some(_) => device("gen.to", 0)?,
                    None => farthest_from(&sim, from),
                };
                if from == to {
                    return Err(value_err("gen.to", "destination equals the source"));
                }
                let default_time = if kind == Kind::Tree { 20.0 } else { 10.0 };
                Generation::Single {
                    from,
                    to,
                    time: kv.get_or("gen.time", default_time)?,
                }
            }
            Kind::Multi => {
                let count: u64 = kv.get_or("gen.count", 10)?;
                if count > n {
                    return Err(value_err(
                        "gen.count",
                        format!("more generators than the {n} devices"),
                    ));
                }
                let prob: f64 = kv.get_or("gen.prob", 0.05)?;
                if !(0.0..=1.0).contains(&prob) {
                    return Err(value_err("gen.prob", "must lie in [0, 1]"));
                }
                Generation::Random {
                    generators: (0..count).map(DeviceId).collect(),
                    prob,
                    start: kv.get_or("gen.start", 1.0)?,
                    end: kv.get_or("gen.end", 25.0)?,
                }
            }
            _ => Generation::None,
        };
        let d = MonitorParams::default();
        let monitor = MonitorParams {
            replicas: kv.get_or("monitor.replicas", d.replicas)?,
            diameter: kv.get_or("monitor.diameter", d.diameter)?,
            infospeed: kv.get_or("monitor.infospeed", d.infospeed)?,
            slcs_range: kv.get_or("monitor.slcs_range", d.slcs_range)?,
        };
        if monitor.replicas < 2 {
            return Err(value_err(
                "monitor.replicas",
                "at least two replicas are needed",
            ));
        }
        let link = LinkOptions {
            gossip_clock: match kv.get("clock").unwrap_or("local") {
                "local" => false,
                "gossip" => true,
                other => {
                    return Err(value_err(
                        "clock",
                        format!("expected `local` or `gossip`, found `{other}`"),
                    ))
                }
            },
        };
        let offer_rounds: u32 = kv.get_or("propagation.offer_rounds", 1)?;
        if offer_rounds == 0 {
            return Err(value_err("propagation.offer_rounds", "must be at least 1"));
        }
        let dt: f64 = kv.get_or("sample.dt", 0.5)?;
        if !(dt > 0.0) {
            return Err(value_err("sample.dt", "must be positive"));
        }
        Ok(Scenario {
            kind,
            generation,
            root: device("tree.root", 0)?,
            critic: Critic {
                device: match kv.get("critic.device") {
                    None | Some("center") => nearest_to_center(&sim),
                    Some(_) => device("critic.device", 0)?,
                },
                start: kv.get_or("critic.start", 20.0)?,
                end: kv.get_or("critic.end", 25.0)?,
            },
            source: device("gradient.source", 0)?,
            monitor,
            link,
            offer_rounds,
            dt,
            program: None,
            sim,
        })
    }

    pub fn program(&self) -> Result<Expr, ScenarioError> {
        Ok(match self.kind {
            Kind::Sphere | Kind::Multi => programs::sphere_propagation_program(self.offer_rounds),
            Kind::Tree => programs::tree_propagation_program(self.offer_rounds),
            Kind::Monitoring => programs::monitoring_program(&self.monitor, self.link),
            Kind::Gradient => programs::gradient_program(),
            Kind::Custom => {
                let src = self
                    .program
                    .as_deref()
                    .ok_or(ScenarioError::MissingProgram)?;
                programs::custom_program(src, self.link).map_err(ScenarioError::Program)?
            }
        })
    }

    /// Runs the scenario and computes its metrics.
    pub fn run(&self) -> Result<ScenarioRun, ScenarioError> {
        let program = self.program()?;
        let mut sensors = ScenarioSensors::new(self);
        let trace = run(&self.sim, &program, &mut sensors)?;
        let n = self.sim.devices;
        let end = self.sim.duration;
        let series = match self.kind {
            Kind::Sphere | Kind::Tree | Kind::Multi => {
                vec![("aproc".to_string(), aproc(&trace, n, end, self.dt))]
            }
            Kind::Monitoring => MONITORS
                .iter()
                .enumerate()
                .map(|(i, name)| (name.to_string(), truth_fraction(&trace, n, i, end, self.dt)))
                .collect(),
            Kind::Gradient | Kind::Custom => {
                vec![("mean".to_string(), mean_output(&trace, n, end, self.dt))]
            }
        };
        Ok(ScenarioRun {
            trace,
            messages: sensors.messages,
            series,
        })
    }
}

/// Column names of the monitoring metrics, in output order.
pub const MONITORS: [&str; 4] = [
    "critic",
    "ever_critic",
    "somewhere_slcs",
    "somewhere_replicated",
];

/// The device closest to the middle of the area at the start.
fn nearest_to_center(sim: &SimConfig) -> DeviceId {
    let pos = initial_positions(sim);
    let b = sim.bounds();
    let mid = xc_netsim::Point::new3(b.x / 2.0, b.y / 2.0, b.z / 2.0);
    let best = (0..pos.len()).min_by(|&i, &j| pos[i].dist(&mid).total_cmp(&pos[j].dist(&mid)));
    DeviceId(best.unwrap_or(0) as u64)
}

fn farthest_from(sim: &SimConfig, from: DeviceId) -> DeviceId {
    let pos = initial_positions(sim);
    let here = pos[from.0 as usize];
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, p) in pos.iter().enumerate() {
        let d = here.dist(p);
        if i != from.0 as usize && d > best.1 {
            best = (i, d);
        }
    }
    DeviceId(best.0 as u64)
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub trace: Trace,
    /// Messages in creation order.
    pub messages: Vec<Message>,
    pub series: Vec<(String, TimeSeries)>,
}

impl ScenarioRun {
    pub fn series(&self, name: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

/// Sensors of every scenario: `messages`, `root`, `critic` and `source`.
pub struct ScenarioSensors {
    generation: Generation,
    devices: u64,
    root: DeviceId,
    critic: Critic,
    source: DeviceId,
    rng: ChaCha8Rng,
    single_done: bool,
    pub messages: Vec<Message>,
}

impl ScenarioSensors {
    pub fn new(s: &Scenario) -> Self {
        ScenarioSensors {
            generation: s.generation.clone(),
            devices: s.sim.devices as u64,
            root: s.root,
            critic: s.critic,
            source: s.source,
            rng: rng_stream(s.sim.seed, GENERATION_STREAM),
            single_done: false,
            messages: Vec::new(),
        }
    }

    fn generate(&mut self, ctx: &SenseContext<'_>) -> Vec<Message> {
        match &self.generation {
            Generation::None => vec![],
            Generation::Single { from, to, time } => {
                if self.single_done || ctx.device != *from || ctx.time < *time {
                    return vec![];
                }
                self.single_done = true;
                vec![Message {
                    from: *from,
                    to: *to,
                    payload: LocalValue::Int(0),
                    created: ctx.time,
                }]
            }
            Generation::Random {
                generators,
                prob,
                start,
                end,
            } => {
                if !generators.contains(&ctx.device) || ctx.time < *start || ctx.time > *end {
                    return vec![];
                }
                if !self.rng.random_bool(*prob) {
                    return vec![];
                }
                let others: Vec<u64> = (0..self.devices).filter(|&d| d != ctx.device.0).collect();
                let Some(&to) = others.choose(&mut self.rng) else {
                    return vec![];
                };
                vec![Message {
                    from: ctx.device,
                    to: DeviceId(to),
                    payload: LocalValue::Int(ctx.round as i64),
                    created: ctx.time,
                }]
            }
        }
    }
}

impl SensorPlugin for ScenarioSensors {
    fn sense(&mut self, ctx: &SenseContext<'_>, sensors: &mut SensorState) {
        let new = self.generate(ctx);
        let keys: BTreeSet<LocalValue> = new.iter().map(Message::key).collect();
        self.messages.extend(new);
        let c = &self.critic;
        let critic = ctx.device == c.device && c.start <= ctx.time && ctx.time <= c.end;
        let s = &mut sensors.scalars;
        s.insert("messages".into(), LocalValue::Set(Arc::new(keys)));
        s.insert("root".into(), (ctx.device == self.root).into());
        s.insert("critic".into(), critic.into());
        s.insert("source".into(), (ctx.device == self.source).into());
    }
}
