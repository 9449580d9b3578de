//! Free variables and static checks of whole programs.

use std::collections::BTreeSet;
use std::fmt;

use xc_core::{Builtin, Expr};

use crate::lexer::{tokenize, Span};
use crate::parser::{parse_with_spans, SpanTable};

pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    match e {
        Expr::Var(x) => BTreeSet::from([x.to_string()]),
        Expr::Lit(_) | Expr::NLit(_) => BTreeSet::new(),
        Expr::Fun(f) => {
            let mut fv = free_vars(&f.body);
            fv.remove(&*f.name);
            for p in &f.params {
                fv.remove(&**p);
            }
            fv
        }
        Expr::App(f, args) => {
            let mut fv = free_vars(f);
            for a in args {
                fv.extend(free_vars(a));
            }
            fv
        }
        Expr::Val(x, bound, body) => {
            let mut rest = free_vars(body);
            rest.remove(&**x);
            let mut fv = free_vars(bound);
            fv.extend(rest);
            fv
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Option<Span>,
    pub message: String,
}

impl Diagnostic {
    fn error(span: Option<Span>, message: String) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: message`.
    pub fn render(&self, file: &str) -> String {
        let span = self.span.unwrap_or(Span { line: 1, col: 1 });
        match self.severity {
            Severity::Error => format!("{file}:{span}: {}", self.message),
            Severity::Warning => format!("{file}:{span}: warning: {}", self.message),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{s}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Programs must be closed (builtins aside) and free of nvalue literals.
/// Binding a builtin's name is allowed but reported as a warning.
pub fn check_program(e: &Expr) -> Vec<Diagnostic> {
    check_with_spans(e, &SpanTable::default(), &BTreeSet::new())
}

/// Like [`check_program`], with extra names treated as bound at top level.
pub fn check_program_with(e: &Expr, globals: &BTreeSet<String>) -> Vec<Diagnostic> {
    check_with_spans(e, &SpanTable::default(), globals)
}

struct Checker<'a> {
    spans: &'a SpanTable,
    globals: &'a BTreeSet<String>,
    var_index: usize,
    nlit_index: usize,
    reported: BTreeSet<String>,
    out: Vec<Diagnostic>,
}

pub(crate) fn check_with_spans(
    e: &Expr,
    spans: &SpanTable,
    globals: &BTreeSet<String>,
) -> Vec<Diagnostic> {
    let mut c = Checker {
        spans,
        globals,
        var_index: 0,
        nlit_index: 0,
        reported: BTreeSet::new(),
        out: Vec::new(),
    };
    c.visit(e, &mut Vec::new());
    c.out
}

impl Checker<'_> {
    fn binder(&mut self, name: &str) {
        if Builtin::from_name(name).is_some() {
            self.out.push(Diagnostic {
                severity: Severity::Warning,
                span: None,
                message: format!("`{name}` shadows a builtin"),
            });
        }
    }

    fn visit(&mut self, e: &Expr, bound: &mut Vec<String>) {
        match e {
            Expr::Var(x) => {
                let span = self.spans.vars.get(self.var_index).copied();
                self.var_index += 1;
                let known = bound.iter().any(|b| **b == **x)
                    || self.globals.contains(&**x)
                    || Builtin::from_name(x).is_some();
                if !known && self.reported.insert(x.to_string()) {
                    self.out
                        .push(Diagnostic::error(span, format!("unbound variable `{x}`")));
                }
            }
            Expr::Lit(_) => {}
            Expr::NLit(_) => {
                let span = self.spans.nlits.get(self.nlit_index).copied();
                self.nlit_index += 1;
                self.out
                    .push(Diagnostic::error(span, "nvalue literal in program".into()));
            }
            Expr::Fun(f) => {
                let depth = bound.len();
                self.binder(&f.name);
                bound.push(f.name.to_string());
                for p in &f.params {
                    self.binder(p);
                    bound.push(p.to_string());
                }
                self.visit(&f.body, bound);
                bound.truncate(depth);
            }
            Expr::App(f, args) => {
                self.visit(f, bound);
                for a in args {
                    self.visit(a, bound);
                }
            }
            Expr::Val(x, b, body) => {
                self.visit(b, bound);
                self.binder(x);
                bound.push(x.to_string());
                self.visit(body, bound);
                bound.pop();
            }
        }
    }
}

/// Source text together with its parse and diagnostics.
#[derive(Debug, Clone)]
pub struct SourceProgram {
    pub text: String,
    /// Present iff `diagnostics` contains no errors.
    pub parsed: Option<Expr>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SourceProgram {
    pub fn new(text: &str) -> Self {
        SourceProgram::with_globals(text, &BTreeSet::new())
    }

    /// Parses and checks `text`, accepting free references to `globals`.
    pub fn with_globals(text: &str, globals: &BTreeSet<String>) -> Self {
        let (parsed, diagnostics) = match tokenize(text) {
            Err(e) => (None, vec![Diagnostic::error(Some(e.span), e.message)]),
            Ok(tokens) => match parse_with_spans(&tokens) {
                Err(e) => (None, vec![Diagnostic::error(Some(e.span), e.message)]),
                Ok((e, spans)) => {
                    let diags = check_with_spans(&e, &spans, globals);
                    let ok = !diags.iter().any(Diagnostic::is_error);
                    (ok.then_some(e), diags)
                }
            },
        };
        SourceProgram {
            text: text.to_string(),
            parsed,
            diagnostics,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}
