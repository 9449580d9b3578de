//! Sensor state supplied by the environment at the start of a round.

use std::collections::BTreeMap;

use crate::nvalue::NValue;
use crate::value::LocalValue;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SensorState {
    /// Local readings, queried with `sense(name)`.
    pub scalars: BTreeMap<String, LocalValue>,
    /// Per-neighbour readings such as `nbr_dist`, queried with `nbr_sense(name)`.
    pub relational: BTreeMap<String, NValue>,
    /// Seconds since the start of the run.
    pub current_time: f64,
}

impl SensorState {
    pub fn at_time(t: f64) -> Self {
        SensorState {
            current_time: t,
            ..Default::default()
        }
    }

    pub fn with_scalar(mut self, name: &str, v: impl Into<LocalValue>) -> Self {
        self.scalars.insert(name.to_string(), v.into());
        self
    }

    pub fn with_relational(mut self, name: &str, v: NValue) -> Self {
        self.relational.insert(name.to_string(), v);
        self
    }

    /// A scalar reading; `time` falls back to the current time.
    pub fn scalar(&self, name: &str) -> Option<LocalValue> {
        match self.scalars.get(name) {
            Some(v) => Some(v.clone()),
            None if name == "time" => Some(LocalValue::Real(self.current_time)),
            None => None,
        }
    }

    pub fn relational(&self, name: &str) -> Option<&NValue> {
        self.relational.get(name)
    }
}
