//! Big-step device semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::builtins::Builtin;
use crate::error::EvalError;
use crate::expr::{Expr, Name};
use crate::nvalue::NValue;
use crate::sensors::SensorState;
use crate::tree::{view, view_child, view_fun, EnvView, TreeEnv, ValueTree};
use crate::value::{Closure, DeviceId, LocalValue};

/// Variable bindings, shared structurally between closures.
#[derive(Clone, Default)]
pub struct Scope(Option<Arc<Binding>>);

struct Binding {
    name: Name,
    value: NValue,
    next: Scope,
}

impl Scope {
    pub fn new() -> Self {
        Scope(None)
    }

    pub fn bind(&self, name: Name, value: NValue) -> Scope {
        Scope(Some(Arc::new(Binding {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&NValue> {
        let mut cur = self.0.as_deref();
        while let Some(b) = cur {
            if &*b.name == name {
                return Some(&b.value);
            }
            cur = b.next.0.as_deref();
        }
        None
    }
}

impl fmt::Debug for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        let mut cur = self.0.as_deref();
        while let Some(b) = cur {
            list.entry(&format_args!("{} = {}", b.name, b.value));
            cur = b.next.0.as_deref();
        }
        list.finish()
    }
}

/// Evaluates `e` on device `d` against the trees received from its
/// neighbours. Returns the result and the tree to export.
pub fn evaluate(
    d: DeviceId,
    env: &TreeEnv,
    sensors: &SensorState,
    e: &Expr,
) -> Result<(NValue, ValueTree), EvalError> {
    let m = Machine { d, sensors };
    m.eval(&view(env), &Scope::new(), e)
}

/// Applies an already evaluated function to argument values, as if the
/// arguments were nvalue literals.
pub fn apply_function(
    d: DeviceId,
    env: &TreeEnv,
    sensors: &SensorState,
    f: &LocalValue,
    args: &[NValue],
) -> Result<(NValue, ValueTree), EvalError> {
    let m = Machine { d, sensors };
    m.call_values(&view(env), f, args)
}

struct Machine<'s> {
    d: DeviceId,
    sensors: &'s SensorState,
}

impl Machine<'_> {
    fn eval(
        &self,
        env: &[(DeviceId, &ValueTree)],
        scope: &Scope,
        e: &Expr,
    ) -> Result<(NValue, ValueTree), EvalError> {
        match e {
            Expr::Lit(l) => Ok((NValue::local(l.clone()), ValueTree::empty())),
            Expr::NLit(w) => Ok((w.clone(), ValueTree::empty())),
            Expr::Var(x) => match scope.lookup(x) {
                Some(v) => Ok((v.clone(), ValueTree::empty())),
                None => match Builtin::from_name(x) {
                    Some(b) => Ok((NValue::local(LocalValue::Builtin(b)), ValueTree::empty())),
                    None => Err(EvalError::Unbound(x.to_string())),
                },
            },
            Expr::Fun(def) => {
                if def.tau.is_none() {
                    return Err(EvalError::Unannotated(def.name.to_string()));
                }
                let c = Closure {
                    def: def.clone(),
                    scope: scope.clone(),
                };
                Ok((
                    NValue::local(LocalValue::Closure(Arc::new(c))),
                    ValueTree::empty(),
                ))
            }
            Expr::Val(x, bound, body) => {
                let (w1, t1) = self.eval(&view_child(env, 1), scope, bound)?;
                let inner = scope.bind(x.clone(), w1);
                let (w2, t2) = self.eval(&view_child(env, 2), &inner, body)?;
                Ok((w2, ValueTree::plain(vec![t1, t2])))
            }
            Expr::App(fe, args) => {
                let (w0, t0) = self.eval(&view_child(env, 1), scope, fe)?;
                let mut values = Vec::with_capacity(args.len());
                let mut trees = Vec::with_capacity(args.len() + 2);
                trees.push(t0);
                for (i, a) in args.iter().enumerate() {
                    let (w, t) = self.eval(&view_child(env, i + 2), scope, a)?;
                    values.push(w);
                    trees.push(t);
                }
                let f = w0.get(self.d).clone();
                let aux = self.aux_env(env, &f, args.len())?;
                let (w, t) = self.apply(&aux, &f, &values)?;
                trees.push(t);
                Ok((w, ValueTree::tagged(NValue::local(f), trees)))
            }
        }
    }

    /// `π_{n+2}(Θ|f)`.
    fn aux_env<'t>(
        &self,
        env: &[(DeviceId, &'t ValueTree)],
        f: &LocalValue,
        n: usize,
    ) -> Result<EnvView<'t>, EvalError> {
        let name = f.fun_name().ok_or(EvalError::NotAFunction(f.kind()))?;
        Ok(view_child(&view_fun(env, self.d, name), n + 2))
    }

    /// Application with literal arguments: the tree has empty children for
    /// the function and argument positions.
    fn call_values(
        &self,
        env: &[(DeviceId, &ValueTree)],
        f: &LocalValue,
        args: &[NValue],
    ) -> Result<(NValue, ValueTree), EvalError> {
        let aux = self.aux_env(env, f, args.len())?;
        let (w, t) = self.apply(&aux, f, args)?;
        let mut trees = vec![ValueTree::empty(); args.len() + 1];
        trees.push(t);
        Ok((w, ValueTree::tagged(NValue::local(f.clone()), trees)))
    }

    /// The auxiliary rules: a function value applied to argument values.
    fn apply(
        &self,
        env: &[(DeviceId, &ValueTree)],
        f: &LocalValue,
        args: &[NValue],
    ) -> Result<(NValue, ValueTree), EvalError> {
        match f {
            LocalValue::Closure(c) => {
                let def = &c.def;
                if def.params.len() != args.len() {
                    return Err(EvalError::Arity {
                        name: def.name.to_string(),
                        expected: def.params.len().to_string(),
                        got: args.len(),
                    });
                }
                let mut scope = c.scope.bind(def.name.clone(), NValue::local(f.clone()));
                for (p, a) in def.params.iter().zip(args) {
                    scope = scope.bind(p.clone(), a.clone());
                }
                self.eval(env, &scope, &def.body)
            }
            LocalValue::Builtin(b) => self.builtin(env, *b, args),
            other => Err(EvalError::NotAFunction(other.kind())),
        }
    }

    fn builtin(
        &self,
        env: &[(DeviceId, &ValueTree)],
        b: Builtin,
        args: &[NValue],
    ) -> Result<(NValue, ValueTree), EvalError> {
        if let Some(n) = b.arity() {
            if n != args.len() {
                return Err(EvalError::Arity {
                    name: b.name().to_string(),
                    expected: n.to_string(),
                    got: args.len(),
                });
            }
        }
        let d = self.d;
        let value = match b {
            Builtin::Exchange => return self.exchange(env, &args[0], &args[1]),
            Builtin::Spawn => return self.spawn(env, &args[0], &args[1]),
            Builtin::Nfold => self.nfold(env, &args[0], &args[1], &args[2])?,
            Builtin::Fold => self.fold(&args[0], &args[1], &args[2])?,
            Builtin::SelfValue => NValue::local(args[0].get(d).clone()),
            Builtin::UpdateSelf => args[0].clone().with(d, args[1].get(d).clone()),
            Builtin::Uid => NValue::local(LocalValue::Device(d)),
            Builtin::Sense => {
                let name = self.text_arg(b, &args[0])?;
                let v = self
                    .sensors
                    .scalar(&name)
                    .ok_or(EvalError::UnknownSensor(name))?;
                NValue::local(v)
            }
            Builtin::NbrSense => {
                let name = self.text_arg(b, &args[0])?;
                self.sensors
                    .relational(&name)
                    .cloned()
                    .ok_or(EvalError::UnknownSensor(name))?
            }
            pure => NValue::pointwise(args, |at, xs| pure.apply_local(xs).map_err(|e| e.at(at)))?,
        };
        Ok((value, ValueTree::empty()))
    }

    fn text_arg(&self, b: Builtin, w: &NValue) -> Result<String, EvalError> {
        match w.get(self.d) {
            LocalValue::Text(t) => Ok(t.to_string()),
            other => Err(EvalError::type_error(format!(
                "{}: expected a sensor name, got {}",
                b.name(),
                other.kind()
            ))),
        }
    }

    fn exchange(
        &self,
        env: &[(DeviceId, &ValueTree)],
        init: &NValue,
        f: &NValue,
    ) -> Result<(NValue, ValueTree), EvalError> {
        let mut n = init.clone();
        for (src, t) in env {
            if let Some(sent) = t.tag() {
                n.set(*src, sent.get(self.d).clone());
            }
        }
        let f = f.get(self.d).clone();
        let (w, t) = self.call_values(&view_child(env, 1), &f, &[n])?;
        let (ret, send) = split_pair(&w, "exchange")?;
        Ok((ret, ValueTree::tagged(send, vec![t])))
    }

    fn nfold(
        &self,
        env: &[(DeviceId, &ValueTree)],
        f: &NValue,
        w: &NValue,
        init: &NValue,
    ) -> Result<NValue, EvalError> {
        let f = f.get(self.d).clone();
        let mut acc = init.get(self.d).clone();
        for (nbr, _) in env {
            if *nbr == self.d {
                continue;
            }
            acc = self.call_local(&f, acc, w.get(*nbr).clone())?;
        }
        Ok(NValue::local(acc))
    }

    fn fold(&self, f: &NValue, coll: &NValue, init: &NValue) -> Result<NValue, EvalError> {
        let f = f.get(self.d).clone();
        let mut acc = init.get(self.d).clone();
        let items: Vec<LocalValue> = match coll.get(self.d) {
            LocalValue::Set(s) => s.iter().cloned().collect(),
            LocalValue::Map(m) => m.keys().cloned().collect(),
            other => {
                return Err(EvalError::type_error(format!(
                    "fold: expected a set or map, got {}",
                    other.kind()
                )))
            }
        };
        for item in items {
            acc = self.call_local(&f, acc, item)?;
        }
        Ok(NValue::local(acc))
    }

    /// Binary call under the empty environment, keeping the local result.
    fn call_local(
        &self,
        f: &LocalValue,
        a: LocalValue,
        b: LocalValue,
    ) -> Result<LocalValue, EvalError> {
        let args = [NValue::local(a), NValue::local(b)];
        let (w, _) = self.apply(&[], f, &args)?;
        Ok(w.get(self.d).clone())
    }

    fn spawn(
        &self,
        env: &[(DeviceId, &ValueTree)],
        proc: &NValue,
        keys: &NValue,
    ) -> Result<(NValue, ValueTree), EvalError> {
        let mut active: BTreeSet<LocalValue> = match keys.get(self.d) {
            LocalValue::Set(s) => (**s).clone(),
            other => {
                return Err(EvalError::type_error(format!(
                    "spawn: expected a set of keys, got {}",
                    other.kind()
                )))
            }
        };
        for (_, t) in env {
            let Some(entries) = t.entries() else { continue };
            for (k, sub) in entries {
                let on = sub
                    .tag()
                    .is_some_and(|s| s.get(self.d).as_bool() == Some(true));
                if on {
                    active.insert(k.clone());
                }
            }
        }
        let p = proc.get(self.d).clone();
        let mut outputs = Vec::with_capacity(active.len());
        let mut trees = BTreeMap::new();
        for k in active {
            let sub: EnvView = env
                .iter()
                .filter_map(|(src, t)| {
                    t.entries()
                        .and_then(|m| m.get(&k))
                        .and_then(|s| s.child(1))
                        .map(|c| (*src, c))
                })
                .collect();
            let (w, t) = self.call_values(&sub, &p, &[NValue::local(k.clone())])?;
            let (out, status) = split_pair(&w, "spawn")?;
            if let Some((at, v)) = std::iter::once((None, status.default_value()))
                .chain(status.overrides().map(|(d, v)| (Some(d), v)))
                .find(|(_, v)| v.as_bool().is_none())
            {
                return Err(EvalError::type_error(format!(
                    "spawn: status must be boolean, got {}",
                    v.kind()
                ))
                .at(at));
            }
            trees.insert(k.clone(), ValueTree::tagged(status, vec![t]));
            outputs.push((k, out));
        }
        let values: Vec<NValue> = outputs.iter().map(|(_, w)| w.clone()).collect();
        let result = NValue::pointwise::<EvalError, _>(&values, |_, xs| {
            Ok(LocalValue::map(
                outputs
                    .iter()
                    .zip(xs)
                    .map(|((k, _), v)| (k.clone(), (*v).clone())),
            ))
        })?;
        Ok((result, ValueTree::key_map(trees)))
    }
}

fn split_pair(w: &NValue, what: &str) -> Result<(NValue, NValue), EvalError> {
    let err = |v: &LocalValue| {
        EvalError::type_error(format!(
            "{what}: function must return a pair, got {}",
            v.kind()
        ))
    };
    let fst = w.map(|at, v| {
        v.as_pair()
            .map(|p| p.0.clone())
            .ok_or_else(|| err(v).at(at))
    })?;
    let snd = w.map(|at, v| {
        v.as_pair()
            .map(|p| p.1.clone())
            .ok_or_else(|| err(v).at(at))
    })?;
    Ok((fst, snd))
}
