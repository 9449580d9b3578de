//! Pretty-printer emitting the canonical core syntax: no infix operators,
//! lambdas or `if`, so that reparsing gives back the same tree.

use std::fmt::Write;

use xc_core::value::escape_text;
use xc_core::{format_real, Expr, LocalValue, NValue};

pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

/// Literal text. Compound values have no literal syntax and are written as
/// constructor calls.
pub fn print_literal(v: &LocalValue) -> String {
    match v {
        LocalValue::Unit => "unit".to_string(),
        LocalValue::Real(r) => format_real(*r),
        LocalValue::Text(s) => escape_text(s),
        LocalValue::Map(m) => {
            let mut s = "map()".to_string();
            for (k, v) in m.iter() {
                s = format!("map_put({s}, {}, {})", print_literal(k), print_literal(v));
            }
            s
        }
        other => other.to_string(),
    }
}

fn print_nvalue(w: &NValue) -> String {
    let mut s = print_literal(w.default_value());
    s.push('[');
    for (i, (d, v)) in w.overrides().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{d} -> {}", print_literal(v));
    }
    s.push(']');
    s
}

fn write_expr(out: &mut String, e: &Expr, depth: usize) {
    match e {
        Expr::Var(x) => out.push_str(x),
        Expr::Lit(v) => out.push_str(&print_literal(v)),
        Expr::NLit(w) => out.push_str(&print_nvalue(w)),
        Expr::Fun(f) => {
            let _ = writeln!(out, "fun {}({}) {{", f.name, f.params.join(", "));
            indent(out, depth + 1);
            write_expr(out, &f.body, depth + 1);
            out.push('\n');
            indent(out, depth);
            out.push('}');
        }
        Expr::App(f, args) => {
            write_nested(out, f, depth);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_nested(out, a, depth);
            }
            out.push(')');
        }
        Expr::Val(x, bound, body) => {
            let _ = write!(out, "val {x} = ");
            write_nested(out, bound, depth);
            out.push_str(";\n");
            indent(out, depth);
            write_expr(out, body, depth);
        }
    }
}

/// Sub-expression in a position where a `val` must be parenthesized.
fn write_nested(out: &mut String, e: &Expr, depth: usize) {
    if matches!(e, Expr::Val(..)) {
        out.push_str("(\n");
        indent(out, depth + 1);
        write_expr(out, e, depth + 1);
        out.push('\n');
        indent(out, depth);
        out.push(')');
    } else {
        write_expr(out, e, depth);
    }
}
