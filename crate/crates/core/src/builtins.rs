//! Built-in functions. Pure ones are applied pointwise to their
//! neighbouring-value arguments; the rest are interpreted by the evaluator.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::EvalError;
use crate::value::LocalValue;

macro_rules! builtins {
    ($($variant:ident => $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Builtin {
            $($variant,)*
        }

        impl Builtin {
            pub const ALL: &'static [Builtin] = &[$(Builtin::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Builtin::$variant => $name,)*
                }
            }

            pub fn from_name(name: &str) -> Option<Builtin> {
                match name {
                    $($name => Some(Builtin::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

builtins! {
    Exchange => "exchange",
    Nfold => "nfold",
    SelfValue => "self",
    UpdateSelf => "updateSelf",
    Uid => "uid",
    Mux => "mux",
    Spawn => "spawn",
    Fold => "fold",
    Sense => "sense",
    NbrSense => "nbr_sense",
    Add => "add",
    Sub => "sub",
    Mul => "mul",
    Div => "div",
    Lt => "lt",
    Le => "le",
    Eq => "eq",
    And => "land",
    Or => "lor",
    Not => "lnot",
    Min => "min",
    Max => "max",
    Floor => "floor",
    Abs => "abs",
    Text => "text",
    Pair => "pair",
    Fst => "fst",
    Snd => "snd",
    Set => "set",
    SetInsert => "set_insert",
    SetContains => "set_contains",
    SetUnion => "set_union",
    SetSize => "set_size",
    Map => "map",
    MapPut => "map_put",
    MapGet => "map_get",
    MapHas => "map_has",
    MapKeys => "map_keys",
    MapSize => "map_size",
}

impl Builtin {
    /// Expected argument count; `None` for variadic builtins.
    pub fn arity(self) -> Option<usize> {
        use Builtin::*;
        match self {
            Uid | Map => Some(0),
            SelfValue | Sense | NbrSense | Not | Floor | Abs | Text | Fst | Snd | SetSize
            | MapKeys | MapSize => Some(1),
            Exchange | UpdateSelf | Spawn | Add | Sub | Mul | Div | Lt | Le | Eq | And | Or
            | Min | Max | Pair | SetInsert | SetContains | SetUnion | MapGet | MapHas => Some(2),
            Nfold | Mux | Fold | MapPut => Some(3),
            Set => None,
        }
    }

    /// Whether the builtin is a pointwise lifting of a local function.
    pub fn is_pure(self) -> bool {
        use Builtin::*;
        !matches!(
            self,
            Exchange | Nfold | SelfValue | UpdateSelf | Uid | Spawn | Fold | Sense | NbrSense
        )
    }

    /// Applies a pure builtin to local arguments.
    pub fn apply_local(self, args: &[&LocalValue]) -> Result<LocalValue, EvalError> {
        use Builtin::*;
        use LocalValue as L;
        let a = |i: usize| args[i];
        Ok(match self {
            Add => match (a(0), a(1)) {
                (L::Int(x), L::Int(y)) => L::Int(
                    x.checked_add(*y)
                        .ok_or_else(|| EvalError::Arithmetic("integer overflow in add".into()))?,
                ),
                (L::Text(x), L::Text(y)) => L::Text(Arc::from(format!("{x}{y}"))),
                (x, y) => L::Real(num(x, self)? + num(y, self)?),
            },
            Sub => match (a(0), a(1)) {
                (L::Int(x), L::Int(y)) => L::Int(
                    x.checked_sub(*y)
                        .ok_or_else(|| EvalError::Arithmetic("integer overflow in sub".into()))?,
                ),
                (x, y) => L::Real(num(x, self)? - num(y, self)?),
            },
            Mul => match (a(0), a(1)) {
                (L::Int(x), L::Int(y)) => L::Int(
                    x.checked_mul(*y)
                        .ok_or_else(|| EvalError::Arithmetic("integer overflow in mul".into()))?,
                ),
                (x, y) => L::Real(num(x, self)? * num(y, self)?),
            },
            Div => match (a(0), a(1)) {
                (L::Int(_), L::Int(0)) => {
                    return Err(EvalError::Arithmetic("integer division by zero".into()))
                }
                (L::Int(x), L::Int(y)) => L::Int(
                    x.checked_div(*y)
                        .ok_or_else(|| EvalError::Arithmetic("integer overflow in div".into()))?,
                ),
                (x, y) => L::Real(num(x, self)? / num(y, self)?),
            },
            Lt => L::Bool(compare(a(0), a(1), self)?.is_lt()),
            Le => L::Bool(compare(a(0), a(1), self)?.is_le()),
            Eq => L::Bool(match (a(0).as_real(), a(1).as_real()) {
                (Some(x), Some(y)) => x == y,
                _ => a(0) == a(1),
            }),
            And => L::Bool(boolean(a(0), self)? && boolean(a(1), self)?),
            Or => L::Bool(boolean(a(0), self)? || boolean(a(1), self)?),
            Not => L::Bool(!boolean(a(0), self)?),
            Min | Max => {
                let ord = compare(a(0), a(1), self)?;
                let pick_first = if self == Min {
                    ord.is_le()
                } else {
                    ord.is_ge()
                };
                let (x, y) = if pick_first {
                    (a(0), a(1))
                } else {
                    (a(1), a(0))
                };
                match (x, y) {
                    (L::Int(_), L::Real(_)) | (L::Real(_), L::Int(_)) => {
                        L::Real(x.as_real().unwrap_or(f64::NAN))
                    }
                    _ => x.clone(),
                }
            }
            Floor => match a(0) {
                L::Int(x) => L::Int(*x),
                L::Real(r) if r.is_finite() && r.abs() < 9.2e18 => L::Int(r.floor() as i64),
                L::Real(r) => {
                    return Err(EvalError::Arithmetic(format!("floor of {r} is not an int")))
                }
                x => return Err(kind_error(self, x)),
            },
            Abs => match a(0) {
                L::Int(x) => L::Int(
                    x.checked_abs()
                        .ok_or_else(|| EvalError::Arithmetic("integer overflow in abs".into()))?,
                ),
                L::Real(r) => L::Real(r.abs()),
                x => return Err(kind_error(self, x)),
            },
            Text => match a(0) {
                L::Text(t) => L::Text(t.clone()),
                x => L::text(&x.to_string()),
            },
            Pair => L::pair(a(0).clone(), a(1).clone()),
            Fst => a(0)
                .as_pair()
                .ok_or_else(|| kind_error(self, a(0)))?
                .0
                .clone(),
            Snd => a(0)
                .as_pair()
                .ok_or_else(|| kind_error(self, a(0)))?
                .1
                .clone(),
            Set => L::set(args.iter().map(|v| (*v).clone())),
            SetInsert => {
                let mut s = set(a(0), self)?.clone();
                s.insert(a(1).clone());
                L::Set(Arc::new(s))
            }
            SetContains => L::Bool(set(a(0), self)?.contains(a(1))),
            SetUnion => {
                let (x, y) = (set(a(0), self)?, set(a(1), self)?);
                if y.is_subset(x) {
                    a(0).clone()
                } else {
                    L::Set(Arc::new(x.union(y).cloned().collect()))
                }
            }
            SetSize => L::Int(set(a(0), self)?.len() as i64),
            Map => L::map([]),
            MapPut => {
                let mut m = map(a(0), self)?.clone();
                m.insert(a(1).clone(), a(2).clone());
                L::Map(Arc::new(m))
            }
            MapGet => map(a(0), self)?
                .get(a(1))
                .cloned()
                .ok_or_else(|| EvalError::type_error(format!("map_get: missing key {}", a(1))))?,
            MapHas => L::Bool(map(a(0), self)?.contains_key(a(1))),
            MapKeys => L::Set(Arc::new(
                map(a(0), self)?.keys().cloned().collect::<BTreeSet<_>>(),
            )),
            MapSize => L::Int(map(a(0), self)?.len() as i64),
            Mux => {
                if boolean(a(0), self)? {
                    a(1).clone()
                } else {
                    a(2).clone()
                }
            }
            Exchange | Nfold | SelfValue | UpdateSelf | Uid | Spawn | Fold | Sense | NbrSense => {
                return Err(EvalError::type_error(format!(
                    "{} is not a pointwise builtin",
                    self.name()
                )))
            }
        })
    }
}

fn kind_error(b: Builtin, v: &LocalValue) -> EvalError {
    EvalError::type_error(format!("{}: unexpected {} value {v}", b.name(), v.kind()))
}

fn num(v: &LocalValue, b: Builtin) -> Result<f64, EvalError> {
    v.as_real().ok_or_else(|| kind_error(b, v))
}

fn boolean(v: &LocalValue, b: Builtin) -> Result<bool, EvalError> {
    v.as_bool().ok_or_else(|| kind_error(b, v))
}

fn set(v: &LocalValue, b: Builtin) -> Result<&BTreeSet<LocalValue>, EvalError> {
    v.as_set().ok_or_else(|| kind_error(b, v))
}

fn map(
    v: &LocalValue,
    b: Builtin,
) -> Result<&std::collections::BTreeMap<LocalValue, LocalValue>, EvalError> {
    v.as_map().ok_or_else(|| kind_error(b, v))
}

/// Numbers compare numerically across int and real; other values of the
/// same kind use the total order.
fn compare(x: &LocalValue, y: &LocalValue, b: Builtin) -> Result<std::cmp::Ordering, EvalError> {
    match (x.as_real(), y.as_real()) {
        (Some(p), Some(q)) => Ok(p.total_cmp(&q)),
        (None, None) if x.kind() == y.kind() => Ok(x.cmp(y)),
        _ => Err(EvalError::type_error(format!(
            "{}: cannot compare {} with {}",
            b.name(),
            x.kind(),
            y.kind()
        ))),
    }
}
