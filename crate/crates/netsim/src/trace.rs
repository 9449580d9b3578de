//! Augmented event structures, recorded runs, and the `#trace v1` format.

use std::collections::BTreeSet;
use std::fmt::Write;

use xc_core::{format_real, DeviceId, EvalError, NValue, SensorState, ValueTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Index of the event in its structure.
    pub id: usize,
    pub device: DeviceId,
    pub time: f64,
    /// 1 for the device's first round.
    pub round: u64,
}

/// Events in execution order, the messaging relation as `(src, dst)` event
/// ids, and the sensor readings of every event.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventStructure {
    pub events: Vec<Event>,
    pub edges: Vec<(usize, usize)>,
    pub sensors: Vec<SensorState>,
}

impl EventStructure {
    /// Predecessors of every event, sorted.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.events.len()];
        for &(s, d) in &self.edges {
            if d < preds.len() {
                preds[d].push(s);
            }
        }
        for p in &mut preds {
            p.sort_unstable();
        }
        preds
    }

    /// A topological order of the events, or `None` if the messaging
    /// relation has a cycle or refers to missing events.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.events.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(s, d) in &self.edges {
            if s >= n || d >= n {
                return None;
            }
            indeg[d] += 1;
            succ[s].push(d);
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Done { value: NValue, tree: ValueTree },
    Failed(EvalError),
}

impl Outcome {
    pub fn value(&self) -> Option<&NValue> {
        match self {
            Outcome::Done { value, .. } => Some(value),
            Outcome::Failed(_) => None,
        }
    }

    pub fn tree(&self) -> Option<&ValueTree> {
        match self {
            Outcome::Done { tree, .. } => Some(tree),
            Outcome::Failed(_) => None,
        }
    }

    /// One-line rendering used in trace files.
    pub fn summary(&self) -> String {
        match self {
            Outcome::Done { value, .. } => value.to_string().replace('\n', "\\n"),
            Outcome::Failed(e) => format!("!error {}", e.to_string().replace('\n', " ")),
        }
    }
}

/// A recorded run: the event structure and the space-time value on it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub structure: EventStructure,
    pub outcomes: Vec<Outcome>,
}

impl Trace {
    pub fn events(&self) -> &[Event] {
        &self.structure.events
    }

    pub fn value(&self, event: usize) -> Option<&NValue> {
        self.outcomes[event].value()
    }

    /// `#trace v1` text.
    pub fn export(&self) -> String {
        let mut out = String::from("#trace v1\n");
        for (e, o) in self.structure.events.iter().zip(&self.outcomes) {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                e.id,
                e.device.0,
                format_real(e.time),
                e.round,
                o.summary()
            );
        }
        out.push_str("#edges\n");
        for (s, d) in &self.structure.edges {
            let _ = writeln!(out, "{s} {d}");
        }
        out
    }
}

/// Contents of a trace file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceFile {
    pub events: Vec<Event>,
    pub summaries: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

impl TraceFile {
    pub fn parse(text: &str) -> Result<Self, TraceParseError> {
        let err = |line: usize, message: String| TraceParseError { line, message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "#trace v1")) => {}
            _ => return Err(err(1, "missing `#trace v1` header".into())),
        }
        let mut out = TraceFile::default();
        let mut in_edges = false;
        for (i, line) in lines {
            let n = i + 1;
            if line == "#edges" {
                if in_edges {
                    return Err(err(n, "duplicate `#edges` section".into()));
                }
                in_edges = true;
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if in_edges {
                let mut parts = line.split_whitespace();
                let mut id = |what: &str| -> Result<usize, TraceParseError> {
                    parts
                        .next()
                        .ok_or_else(|| err(n, format!("missing {what} event")))?
                        .parse()
                        .map_err(|e| err(n, format!("bad {what} event: {e}")))
                };
                let s = id("source")?;
                let d = id("target")?;
                out.edges.push((s, d));
                continue;
            }
            let mut parts = line.splitn(5, ' ');
            let mut field = |what: &str| {
                parts
                    .next()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| err(n, format!("missing {what}")))
            };
            let id = field("event id")?;
            let device = field("device")?;
            let time = field("time")?;
            let round = field("round")?;
            let summary = field("result").unwrap_or("").to_string();
            let num = |s: &str, what: &str| -> Result<u64, TraceParseError> {
                s.parse()
                    .map_err(|e| err(n, format!("bad {what} `{s}`: {e}")))
            };
            let time = match time {
                "inf" => f64::INFINITY,
                t => t
                    .parse::<f64>()
                    .map_err(|e| err(n, format!("bad time `{t}`: {e}")))?,
            };
            out.events.push(Event {
                id: num(id, "event id")? as usize,
                device: DeviceId(num(device, "device")?),
                time,
                round: num(round, "round")?,
            });
            out.summaries.push(summary);
        }
        if !in_edges {
            return Err(err(text.lines().count(), "missing `#edges` section".into()));
        }
        Ok(out)
    }

    pub fn structure(&self) -> EventStructure {
        EventStructure {
            events: self.events.clone(),
            edges: self.edges.clone(),
            sensors: vec![SensorState::default(); self.events.len()],
        }
    }
}

/// A violated well-formedness condition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    /// Event at position `index` carries id `id`.
    #[error("event at position {index} has id {id}")]
    BadId { index: usize, id: usize },
    #[error("edge {0} -> {1} refers to a missing event")]
    DanglingEdge(usize, usize),
    #[error("event {0} precedes itself")]
    SelfLoop(usize),
    #[error("the edges contain a cycle")]
    Cycle,
    /// Two predecessors of `event` on the same device.
    #[error("event {event} has two predecessors on device {device}")]
    DuplicateDevice { event: usize, device: DeviceId },
    /// `later` does not follow `earlier` in time or round on their device.
    #[error("event {later} does not follow event {earlier} on its device")]
    NonIncreasing { earlier: usize, later: usize },
    /// An edge from an event that happens later than its target.
    #[error("edge {0} -> {1} goes back in time")]
    BackwardEdge(usize, usize),
}

/// Checks that `s` is a valid augmented event structure: acyclic, with
/// predecessors on distinct devices, and consistently numbered rounds.
/// Finite pasts follow from finiteness.
pub fn validate(s: &EventStructure) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.events.len();
    for (i, e) in s.events.iter().enumerate() {
        if e.id != i {
            out.push(Violation::BadId { index: i, id: e.id });
        }
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &s.edges {
        if a >= n || b >= n {
            out.push(Violation::DanglingEdge(a, b));
        } else if a == b {
            out.push(Violation::SelfLoop(a));
        } else {
            preds[b].push(a);
            if s.events[a].time > s.events[b].time {
                out.push(Violation::BackwardEdge(a, b));
            }
        }
    }
    if s.topological_order().is_none()
        && !out.iter().any(|v| matches!(v, Violation::DanglingEdge(..)))
    {
        out.push(Violation::Cycle);
    }
    for (b, ps) in preds.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for &a in ps {
            let d = s.events[a].device;
            if !seen.insert(d) {
                out.push(Violation::DuplicateDevice {
                    event: b,
                    device: d,
                });
            }
        }
    }
    let mut last: std::collections::BTreeMap<DeviceId, usize> = Default::default();
    for (i, e) in s.events.iter().enumerate() {
        if let Some(&p) = last.get(&e.device) {
            let prev = &s.events[p];
            if !(prev.time < e.time && prev.round < e.round) {
                out.push(Violation::NonIncreasing {
                    earlier: p,
                    later: i,
                });
            }
        }
        last.insert(e.device, i);
    }
    out
}
