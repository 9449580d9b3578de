//! Textual front-end for exchange calculus programs.
//!
//! ```
//! let p = xc_lang::SourceProgram::new("def twice(x) { x + x } twice(21)");
//! assert!(p.parsed.is_some());
//! ```

pub mod check;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use check::{
    check_program, check_program_with, free_vars, Diagnostic, Severity, SourceProgram,
};
pub use lexer::{tokenize, Keyword, LexError, Punct, Span, Token, TokenKind};
pub use parser::{parse, parse_defs, parse_with_spans, ParseError, SpanTable};
pub use printer::{print, print_literal};

/// Tokenizes and parses `text`, reporting the first error as a diagnostic.
pub fn parse_str(text: &str) -> Result<xc_core::Expr, Diagnostic> {
    let tokens = tokenize(text).map_err(|e| Diagnostic {
        severity: Severity::Error,
        span: Some(e.span),
        message: e.message,
    })?;
    parse(&tokens).map_err(|e| Diagnostic {
        severity: Severity::Error,
        span: Some(e.span),
        message: e.message,
    })
}
