//! Case studies: messages propagated by aggregate processes, and monitors of
//! a critical situation, with the metrics used to assess them.

pub mod message;
pub mod metrics;
pub mod programs;
pub mod scenario;

pub use message::Message;
pub use metrics::{
    aproc, delivery_time, export_csv, read_csv, truth_fraction, write_csv, CsvError, TimeSeries,
};
pub use programs::{
    monitoring_program, sphere_propagation_program, tree_propagation_program, MonitorParams,
};
pub use scenario::{
    Critic, Generation, Kind, Scenario, ScenarioError, ScenarioRun, ScenarioSensors, MONITORS,
};
