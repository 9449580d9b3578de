//! Neighbouring values: a default local value plus per-device overrides.

use std::fmt;

use crate::value::{DeviceId, LocalValue};

/// `default[δ₁ ↦ ℓ₁, …]`: the value is `default` for every device except the
/// listed ones.
///
/// Overrides are kept as a vector sorted by device id; neighbourhoods are
/// small, so this beats a tree map for the pointwise merges that dominate
/// evaluation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NValue {
    default: LocalValue,
    overrides: Vec<(DeviceId, LocalValue)>,
}

impl NValue {
    /// Lifts a local value: `ℓ` becomes `ℓ[]`.
    pub fn local(default: LocalValue) -> Self {
        NValue {
            default,
            overrides: Vec::new(),
        }
    }

    pub fn new<I>(default: LocalValue, overrides: I) -> Self
    where
        I: IntoIterator<Item = (DeviceId, LocalValue)>,
    {
        let mut nv = NValue::local(default);
        for (d, v) in overrides {
            nv.set(d, v);
        }
        nv
    }

    pub fn default_value(&self) -> &LocalValue {
        &self.default
    }

    pub fn overrides(&self) -> impl ExactSizeIterator<Item = (DeviceId, &LocalValue)> + '_ {
        self.overrides.iter().map(|(d, v)| (*d, v))
    }

    pub fn has_overrides(&self) -> bool {
        !self.overrides.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = DeviceId> + '_ {
        self.overrides.iter().map(|(d, _)| *d)
    }

    /// `w(δ)`: the override for `d` if present, else the default.
    pub fn get(&self, d: DeviceId) -> &LocalValue {
        match self.overrides.binary_search_by_key(&d, |(k, _)| *k) {
            Ok(i) => &self.overrides[i].1,
            Err(_) => &self.default,
        }
    }

    /// Sets (or replaces) the override for `d`.
    pub fn set(&mut self, d: DeviceId, value: LocalValue) {
        match self.overrides.binary_search_by_key(&d, |(k, _)| *k) {
            Ok(i) => self.overrides[i].1 = value,
            Err(i) => self.overrides.insert(i, (d, value)),
        }
    }

    pub fn with(mut self, d: DeviceId, value: LocalValue) -> Self {
        self.set(d, value);
        self
    }

    pub fn set_default(&mut self, value: LocalValue) {
        self.default = value;
    }

    /// Drops overrides that repeat the default. Lookups are unchanged.
    pub fn normalized(mut self) -> Self {
        let default = &self.default;
        self.overrides.retain(|(_, v)| v != default);
        self
    }

    /// Lookup-equivalence: equal defaults and equal values at every device
    /// mentioned by either side.
    pub fn lookup_eq(&self, other: &NValue) -> bool {
        self.default == other.default
            && self
                .domain()
                .chain(other.domain())
                .all(|d| self.get(d) == other.get(d))
    }

    /// Union of the override domains of several values, sorted.
    pub fn joint_domain<'a, I>(values: I) -> Vec<DeviceId>
    where
        I: IntoIterator<Item = &'a NValue>,
    {
        let mut out: Vec<DeviceId> = Vec::new();
        for nv in values {
            if out.is_empty() {
                out.extend(nv.domain());
                continue;
            }
            if nv.overrides.is_empty() {
                continue;
            }
            let mut merged = Vec::with_capacity(out.len() + nv.overrides.len());
            let (mut i, mut j) = (0, 0);
            while i < out.len() && j < nv.overrides.len() {
                let a = out[i];
                let b = nv.overrides[j].0;
                if a < b {
                    merged.push(a);
                    i += 1;
                } else if b < a {
                    merged.push(b);
                    j += 1;
                } else {
                    merged.push(a);
                    i += 1;
                    j += 1;
                }
            }
            merged.extend_from_slice(&out[i..]);
            merged.extend(nv.overrides[j..].iter().map(|(d, _)| *d));
            out = merged;
        }
        out
    }

    /// Applies `op` pointwise: on the defaults, then at every device in the
    /// union of the override domains. Overrides equal to the resulting
    /// default are dropped.
    pub fn pointwise<E, F>(args: &[NValue], mut op: F) -> Result<NValue, E>
    where
        F: FnMut(Option<DeviceId>, &[&LocalValue]) -> Result<LocalValue, E>,
    {
        let defaults: Vec<&LocalValue> = args.iter().map(|a| &a.default).collect();
        let default = op(None, &defaults)?;
        let domain = NValue::joint_domain(args);
        let mut overrides = Vec::with_capacity(domain.len());
        let mut point: Vec<&LocalValue> = Vec::with_capacity(args.len());
        for d in domain {
            point.clear();
            point.extend(args.iter().map(|a| a.get(d)));
            let v = op(Some(d), &point)?;
            if v != default {
                overrides.push((d, v));
            }
        }
        Ok(NValue { default, overrides })
    }

    /// Pointwise map of a single value.
    pub fn map<E, F>(&self, mut op: F) -> Result<NValue, E>
    where
        F: FnMut(Option<DeviceId>, &LocalValue) -> Result<LocalValue, E>,
    {
        let default = op(None, &self.default)?;
        let mut overrides = Vec::with_capacity(self.overrides.len());
        for (d, v) in &self.overrides {
            let r = op(Some(*d), v)?;
            if r != default {
                overrides.push((*d, r));
            }
        }
        Ok(NValue { default, overrides })
    }
}

impl From<LocalValue> for NValue {
    fn from(v: LocalValue) -> Self {
        NValue::local(v)
    }
}

impl fmt::Display for NValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.default)?;
        for (i, (d, v)) in self.overrides.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d} -> {v}")?;
        }
        write!(f, "]")
    }
}

/// `lift_local`: `ℓ ↦ ℓ[]`.
pub fn lift_local(l: LocalValue) -> NValue {
    NValue::local(l)
}

/// `nv_get`: the local value for `d`, specific or default.
pub fn nv_get(w: &NValue, d: DeviceId) -> LocalValue {
    w.get(d).clone()
}
