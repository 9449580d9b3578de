//! Collective algorithms written in the exchange calculus itself.
//!
//! The library is XC source text. [`compile`] parses a user program, links
//! in the definitions it refers to and annotates the result, ready for
//! evaluation on every device:
//!
//! ```
//! let prog = xc_stdlib::compile("gradient(uid() == #1)").unwrap();
//! assert!(prog.is_annotated());
//! ```

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use xc_core::{annotate, Expr, Name};
use xc_lang::{free_vars, parse_defs, tokenize, Diagnostic, SourceProgram};

pub const PRELUDE: &str = include_str!("prelude.xc");

/// Link-time choices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkOptions {
    /// Bind `shared_clock` to the gossiped clock instead of the local time
    /// sensor.
    pub gossip_clock: bool,
}

/// The prelude's definitions in source order.
pub fn definitions() -> &'static [(Name, Expr)] {
    static DEFS: OnceLock<Vec<(Name, Expr)>> = OnceLock::new();
    DEFS.get_or_init(|| {
        let tokens = tokenize(PRELUDE).expect("prelude tokenizes");
        parse_defs(&tokens).expect("prelude parses")
    })
}

pub fn names() -> BTreeSet<String> {
    definitions().iter().map(|(n, _)| n.to_string()).collect()
}

fn definition(name: &str, opts: LinkOptions) -> Option<Expr> {
    if name == "shared_clock" && opts.gossip_clock {
        let body = Expr::call("shared_clock_gossip", vec![]);
        return Some(Expr::fun("shared_clock", &[], body));
    }
    definitions()
        .iter()
        .find(|(n, _)| &**n == name)
        .map(|(_, e)| e.clone())
}

/// Wraps `program` in `val` bindings for every prelude definition it needs.
/// The result is not annotated.
pub fn link(program: &Expr, opts: LinkOptions) -> Expr {
    let mut needed: BTreeSet<String> = BTreeSet::new();
    let mut pending: Vec<String> = free_vars(program).into_iter().collect();
    while let Some(name) = pending.pop() {
        if let Some(def) = definition(&name, opts) {
            if needed.insert(name) {
                pending.extend(free_vars(&def));
            }
        }
    }
    // Definitions only refer to earlier ones, so binding them in source
    // order keeps every reference in scope.
    let mut out = program.clone();
    for (name, _) in definitions().iter().rev() {
        if needed.contains(&**name) {
            let def = definition(name, opts).expect("listed definition");
            out = Expr::Val(Arc::clone(name), Box::new(def), Box::new(out));
        }
    }
    out
}

/// Parses, checks, links and annotates a program.
pub fn compile_with(text: &str, opts: LinkOptions) -> Result<Expr, Vec<Diagnostic>> {
    let src = SourceProgram::with_globals(text, &names());
    match src.parsed {
        Some(e) => Ok(annotate(&link(&e, opts))),
        None => Err(src.errors().cloned().collect()),
    }
}

pub fn compile(text: &str) -> Result<Expr, Vec<Diagnostic>> {
    compile_with(text, LinkOptions::default())
}

/// Replica period used by `somewhere`: `diameter / (infospeed * (replicas - 1))`.
pub fn replica_period(replicas: u32, diameter: f64, infospeed: f64) -> f64 {
    diameter / (infospeed * (replicas as f64 - 1.0))
}
