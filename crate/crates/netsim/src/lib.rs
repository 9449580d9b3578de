//! Discrete-event simulation of devices running an exchange-calculus
//! program in asynchronous rounds.
//!
//! Every device wakes up periodically, collects the latest trees its current
//! neighbours exported (if not older than the retention), evaluates the
//! program and stores its own tree. The run produces a [`Trace`]: the
//! augmented event structure with the result of every event.

pub mod config;
pub mod geometry;
pub mod schedule;
pub mod sim;
pub mod trace;

pub use config::{sim_config, ConfigError, KeyValues, Mobility, Placement, SimConfig};
pub use geometry::{is_connected, neighbours, neighbours_of, Point};
pub use schedule::{schedule, Slot};
pub use sim::{
    initial_positions, rng_stream, run, standard_sensors, MessageStore, NoSensors, SenseContext,
    SensorPlugin,
};
pub use trace::{
    validate, Event, EventStructure, Outcome, Trace, TraceFile, TraceParseError, Violation,
};
