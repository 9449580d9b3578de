//! Runtime of the exchange calculus: values, neighbouring values, value
//! trees, and the device evaluator.

pub mod builtins;
pub mod error;
pub mod eval;
pub mod expr;
pub mod nvalue;
pub mod sensors;
pub mod tree;
pub mod value;

pub use builtins::Builtin;
pub use error::EvalError;
pub use eval::{apply_function, evaluate, Scope};
pub use expr::{annotate, Expr, FunDef, Name, Tau};
pub use nvalue::{lift_local, nv_get, NValue};
pub use sensors::SensorState;
pub use tree::{project_child, project_fun, Node, TreeEnv, ValueTree};
pub use value::{format_real, DeviceId, FunName, LocalValue};
