//! Local values: the data a single device computes with in one round.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::builtins::Builtin;
use crate::eval::Scope;
use crate::expr::{FunDef, Tau};

/// Identifier of a device in the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeviceId(pub u64);

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl From<u64> for DeviceId {
    fn from(id: u64) -> Self {
        DeviceId(id)
    }
}

/// A function value produced by evaluating a `fun` expression.
///
/// The captured scope plays the role of the substitution performed by the
/// function and `val` rules: free variables of the body are looked up there.
pub struct Closure {
    pub def: Arc<FunDef>,
    pub scope: Scope,
}

impl Closure {
    pub fn tau(&self) -> Option<Tau> {
        self.def.tau
    }
}

impl fmt::Debug for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.def.tau {
            Some(tau) => write!(f, "<fun {}^{}>", self.def.name, tau.0),
            None => write!(f, "<fun {}>", self.def.name),
        }
    }
}

/// A local literal.
///
/// Values are immutable; compound variants share their payload through
/// `Arc` so cloning is cheap.
#[derive(Debug, Clone)]
pub enum LocalValue {
    Unit,
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(Arc<str>),
    Pair(Arc<(LocalValue, LocalValue)>),
    Set(Arc<BTreeSet<LocalValue>>),
    Map(Arc<BTreeMap<LocalValue, LocalValue>>),
    Device(DeviceId),
    Closure(Arc<Closure>),
    Builtin(Builtin),
}

/// The name used to align function calls across devices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunName {
    Builtin(Builtin),
    Tau(Tau),
    /// A closure built from an expression that was never annotated.
    Anonymous,
}

impl LocalValue {
    pub fn pair(a: LocalValue, b: LocalValue) -> Self {
        LocalValue::Pair(Arc::new((a, b)))
    }

    pub fn text(s: &str) -> Self {
        LocalValue::Text(Arc::from(s))
    }

    pub fn set<I: IntoIterator<Item = LocalValue>>(items: I) -> Self {
        LocalValue::Set(Arc::new(items.into_iter().collect()))
    }

    pub fn map<I: IntoIterator<Item = (LocalValue, LocalValue)>>(items: I) -> Self {
        LocalValue::Map(Arc::new(items.into_iter().collect()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LocalValue::Unit => "unit",
            LocalValue::Bool(_) => "bool",
            LocalValue::Int(_) => "int",
            LocalValue::Real(_) => "real",
            LocalValue::Text(_) => "text",
            LocalValue::Pair(_) => "pair",
            LocalValue::Set(_) => "set",
            LocalValue::Map(_) => "map",
            LocalValue::Device(_) => "device",
            LocalValue::Closure(_) => "function",
            LocalValue::Builtin(_) => "builtin",
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(self, LocalValue::Closure(_) | LocalValue::Builtin(_))
    }

    /// Alignment name of a function value; `None` for data.
    pub fn fun_name(&self) -> Option<FunName> {
        match self {
            LocalValue::Builtin(b) => Some(FunName::Builtin(*b)),
            LocalValue::Closure(c) => Some(match c.tau() {
                Some(tau) => FunName::Tau(tau),
                None => FunName::Anonymous,
            }),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            LocalValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            LocalValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Numeric view: ints are widened to reals.
    pub fn as_real(&self) -> Option<f64> {
        match self {
            LocalValue::Int(i) => Some(*i as f64),
            LocalValue::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_device(&self) -> Option<DeviceId> {
        match self {
            LocalValue::Device(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&LocalValue, &LocalValue)> {
        match self {
            LocalValue::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<LocalValue>> {
        match self {
            LocalValue::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&BTreeMap<LocalValue, LocalValue>> {
        match self {
            LocalValue::Map(m) => Some(m),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            LocalValue::Unit => 0,
            LocalValue::Bool(_) => 1,
            LocalValue::Int(_) => 2,
            LocalValue::Real(_) => 3,
            LocalValue::Text(_) => 4,
            LocalValue::Pair(_) => 5,
            LocalValue::Set(_) => 6,
            LocalValue::Map(_) => 7,
            LocalValue::Device(_) => 8,
            LocalValue::Closure(_) => 9,
            LocalValue::Builtin(_) => 10,
        }
    }
}

// Total order: by variant first, then by payload. Reals use `total_cmp`,
// closures compare by their annotation only.
impl Ord for LocalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use LocalValue::*;
        match (self, other) {
            (Unit, Unit) => Ordering::Equal,
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Real(a), Real(b)) => a.total_cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (Pair(a), Pair(b)) => a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)),
            (Set(a), Set(b)) => a.iter().cmp(b.iter()),
            (Map(a), Map(b)) => a.iter().cmp(b.iter()),
            (Device(a), Device(b)) => a.cmp(b),
            (Closure(a), Closure(b)) => a.tau().cmp(&b.tau()),
            (Builtin(a), Builtin(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for LocalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for LocalValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LocalValue {}

impl From<bool> for LocalValue {
    fn from(b: bool) -> Self {
        LocalValue::Bool(b)
    }
}

impl From<i64> for LocalValue {
    fn from(i: i64) -> Self {
        LocalValue::Int(i)
    }
}

impl From<f64> for LocalValue {
    fn from(r: f64) -> Self {
        LocalValue::Real(r)
    }
}

impl From<DeviceId> for LocalValue {
    fn from(d: DeviceId) -> Self {
        LocalValue::Device(d)
    }
}

impl From<&str> for LocalValue {
    fn from(s: &str) -> Self {
        LocalValue::text(s)
    }
}

/// Formats a real so that parsing the text yields the same bits.
pub fn format_real(r: f64) -> String {
    if r == f64::INFINITY {
        "inf".to_string()
    } else if r == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if r.is_nan() {
        "nan".to_string()
    } else {
        // `{:?}` is the shortest representation that round-trips and always
        // carries a decimal point or exponent.
        format!("{r:?}")
    }
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for LocalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalValue::Unit => write!(f, "unit"),
            LocalValue::Bool(b) => write!(f, "{b}"),
            LocalValue::Int(i) => write!(f, "{i}"),
            LocalValue::Real(r) => write!(f, "{}", format_real(*r)),
            LocalValue::Text(s) => write!(f, "{}", escape_text(s)),
            LocalValue::Pair(p) => write!(f, "pair({}, {})", p.0, p.1),
            LocalValue::Set(s) => {
                write!(f, "set(")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
            LocalValue::Map(m) => {
                write!(f, "map(")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                write!(f, ")")
            }
            LocalValue::Device(d) => write!(f, "{d}"),
            LocalValue::Closure(c) => write!(f, "{c:?}"),
            LocalValue::Builtin(b) => write!(f, "{}", b.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_total_across_kinds() {
        let mut v = [
            LocalValue::Device(DeviceId(1)),
            LocalValue::Real(1.5),
            LocalValue::Int(3),
            LocalValue::Unit,
            LocalValue::Bool(true),
        ];
        v.sort();
        assert_eq!(v[0], LocalValue::Unit);
        assert_eq!(v[4], LocalValue::Device(DeviceId(1)));
    }

    #[test]
    fn reals_round_trip_through_text() {
        for r in [0.1, 1.0, 1e300, -2.5e-8, 123456789.125] {
            assert_eq!(format_real(r).parse::<f64>().unwrap(), r);
        }
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn pair_equality_is_structural() {
        assert_eq!(
            LocalValue::pair(1i64.into(), 2i64.into()),
            LocalValue::pair(1i64.into(), 2i64.into())
        );
        assert_ne!(LocalValue::Int(1), LocalValue::Real(1.0));
    }
}
