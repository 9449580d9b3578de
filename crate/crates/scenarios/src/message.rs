//! Messages carried by propagation processes.

use std::sync::Arc;

use xc_core::{DeviceId, LocalValue};

/// A message from one device to another. It is also the key of the process
/// instance that carries it.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub from: DeviceId,
    pub to: DeviceId,
    pub payload: LocalValue,
    pub created: f64,
}

fn pair(a: LocalValue, b: LocalValue) -> LocalValue {
    LocalValue::Pair(Arc::new((a, b)))
}

impl Message {
    /// `pair(from, pair(to, pair(payload, created)))`.
    pub fn key(&self) -> LocalValue {
        pair(
            LocalValue::Device(self.from),
            pair(
                LocalValue::Device(self.to),
                pair(self.payload.clone(), LocalValue::Real(self.created)),
            ),
        )
    }

    pub fn from_key(key: &LocalValue) -> Option<Message> {
        let LocalValue::Pair(p) = key else {
            return None;
        };
        let (LocalValue::Device(from), LocalValue::Pair(rest)) = &**p else {
            return None;
        };
        let (LocalValue::Device(to), LocalValue::Pair(rest)) = &**rest else {
            return None;
        };
        let (payload, LocalValue::Real(created)) = &**rest else {
            return None;
        };
        Some(Message {
            from: *from,
            to: *to,
            payload: payload.clone(),
            created: *created,
        })
    }
}
