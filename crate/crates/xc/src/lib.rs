//! Exchange calculus toolkit: the device interpreter, a textual front-end,
//! a library of collective algorithms, a round-based network simulator,
//! reference oracles, and the message propagation and monitoring case
//! studies.
//!
//! The runtime types live at the top level; every other layer is a module.
//!
//! ```
//! use xc::{netsim, stdlib};
//!
//! let program = stdlib::compile("gradient(uid() == #0)").unwrap();
//! let cfg = netsim::SimConfig {
//!     devices: 3,
//!     range: 60.0,
//!     ..Default::default()
//! };
//! let trace = netsim::run(&cfg, &program, &mut netsim::NoSensors).unwrap();
//! assert!(netsim::validate(&trace.structure).is_empty());
//! ```

pub mod cli;

pub use xc_core::*;
pub use xc_lang as lang;
pub use xc_netsim as netsim;
pub use xc_oracles as oracles;
pub use xc_scenarios as scenarios;
pub use xc_stdlib as stdlib;
