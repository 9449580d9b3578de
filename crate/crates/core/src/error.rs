use thiserror::Error;

use crate::value::DeviceId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("type error{}: {message}", at_device(.device))]
    Type {
        message: String,
        device: Option<DeviceId>,
    },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: String,
        got: usize,
    },
    #[error("cannot apply a value of kind {0}")]
    NotAFunction(&'static str),
    #[error("function `{0}` was never annotated")]
    Unannotated(String),
    #[error("unknown sensor `{0}`")]
    UnknownSensor(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
}

fn at_device(d: &Option<DeviceId>) -> String {
    match d {
        Some(d) => format!(" at {d}"),
        None => String::new(),
    }
}

impl EvalError {
    pub fn type_error(message: impl Into<String>) -> Self {
        EvalError::Type {
            message: message.into(),
            device: None,
        }
    }

    /// Attaches the device at which a pointwise operation failed.
    pub fn at(self, d: Option<DeviceId>) -> Self {
        match self {
            EvalError::Type {
                message,
                device: None,
            } => EvalError::Type { message, device: d },
            other => other,
        }
    }
}
