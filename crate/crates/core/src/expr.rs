//! Abstract syntax of exchange-calculus expressions.

use std::fmt;
use std::sync::Arc;

use crate::nvalue::NValue;
use crate::value::LocalValue;

pub type Name = Arc<str>;

/// Unique annotation of a `fun` expression. Closures created from the same
/// expression share it, and calls align across devices by it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tau(pub u32);

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ{}", self.0)
    }
}

/// `fun name(params) { body }`, optionally annotated.
#[derive(Debug, Clone, PartialEq)]
pub struct FunDef {
    pub tau: Option<Tau>,
    pub name: Name,
    pub params: Vec<Name>,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(Name),
    Fun(Arc<FunDef>),
    App(Box<Expr>, Vec<Expr>),
    Val(Name, Box<Expr>, Box<Expr>),
    Lit(LocalValue),
    NLit(NValue),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn fun(name: &str, params: &[&str], body: Expr) -> Expr {
        Expr::Fun(Arc::new(FunDef {
            tau: None,
            name: Arc::from(name),
            params: params.iter().map(|p| Arc::from(*p)).collect(),
            body,
        }))
    }

    pub fn app(f: Expr, args: Vec<Expr>) -> Expr {
        Expr::App(Box::new(f), args)
    }

    /// Application of a named function, usually a builtin.
    pub fn call(f: &str, args: Vec<Expr>) -> Expr {
        Expr::app(Expr::var(f), args)
    }

    pub fn val(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Val(Arc::from(name), Box::new(bound), Box::new(body))
    }

    pub fn lit(v: impl Into<LocalValue>) -> Expr {
        Expr::Lit(v.into())
    }

    /// Number of nodes, for diagnostics and generators.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Lit(_) | Expr::NLit(_) => 1,
            Expr::Fun(f) => 1 + f.body.size(),
            Expr::App(f, args) => 1 + f.size() + args.iter().map(Expr::size).sum::<usize>(),
            Expr::Val(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Whether any `fun` node lacks an annotation.
    pub fn is_annotated(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Lit(_) | Expr::NLit(_) => true,
            Expr::Fun(f) => f.tau.is_some() && f.body.is_annotated(),
            Expr::App(f, args) => f.is_annotated() && args.iter().all(Expr::is_annotated),
            Expr::Val(_, a, b) => a.is_annotated() && b.is_annotated(),
        }
    }

    /// Copy of the expression with every annotation removed.
    pub fn strip_annotations(&self) -> Expr {
        match self {
            Expr::Var(_) | Expr::Lit(_) | Expr::NLit(_) => self.clone(),
            Expr::Fun(f) => Expr::Fun(Arc::new(FunDef {
                tau: None,
                name: f.name.clone(),
                params: f.params.clone(),
                body: f.body.strip_annotations(),
            })),
            Expr::App(f, args) => Expr::App(
                Box::new(f.strip_annotations()),
                args.iter().map(Expr::strip_annotations).collect(),
            ),
            Expr::Val(x, a, b) => Expr::Val(
                x.clone(),
                Box::new(a.strip_annotations()),
                Box::new(b.strip_annotations()),
            ),
        }
    }

    /// Visits every `fun` node in pre-order.
    pub fn for_each_fun<F: FnMut(&FunDef)>(&self, f: &mut F) {
        match self {
            Expr::Var(_) | Expr::Lit(_) | Expr::NLit(_) => {}
            Expr::Fun(def) => {
                f(def);
                def.body.for_each_fun(f);
            }
            Expr::App(g, args) => {
                g.for_each_fun(f);
                for a in args {
                    a.for_each_fun(f);
                }
            }
            Expr::Val(_, a, b) => {
                a.for_each_fun(f);
                b.for_each_fun(f);
            }
        }
    }
}

/// Annotates every `fun` node with its pre-order index.
///
/// Numbering depends only on the shape of the tree, so every device that
/// parses the same program text assigns the same names, and annotating an
/// annotated program leaves it unchanged.
pub fn annotate(e: &Expr) -> Expr {
    let mut next = 0u32;
    annotate_from(e, &mut next)
}

fn annotate_from(e: &Expr, next: &mut u32) -> Expr {
    match e {
        Expr::Var(_) | Expr::Lit(_) | Expr::NLit(_) => e.clone(),
        Expr::Fun(f) => {
            let tau = Tau(*next);
            *next += 1;
            Expr::Fun(Arc::new(FunDef {
                tau: Some(tau),
                name: f.name.clone(),
                params: f.params.clone(),
                body: annotate_from(&f.body, next),
            }))
        }
        Expr::App(f, args) => {
            let f = annotate_from(f, next);
            let args = args.iter().map(|a| annotate_from(a, next)).collect();
            Expr::App(Box::new(f), args)
        }
        Expr::Val(x, a, b) => {
            let a = annotate_from(a, next);
            let b = annotate_from(b, next);
            Expr::Val(x.clone(), Box::new(a), Box::new(b))
        }
    }
}
