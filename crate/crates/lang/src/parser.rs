//! Recursive-descent parser with desugaring of lambdas, `def`, `if` and
//! infix operators.
//!
//! Precedence, loosest first: `or`, `and`, comparisons (`<`, `<=`, `==`),
//! `+` and `-`, `*`, then calls.

use std::collections::HashSet;
use std::sync::Arc;

use xc_core::{DeviceId, Expr, FunDef, LocalValue, NValue, Name};

use crate::lexer::{Keyword, Punct, Span, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

/// Source positions of `Var` and `NLit` nodes, each in pre-order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpanTable {
    pub vars: Vec<Span>,
    pub nlits: Vec<Span>,
}

pub fn parse(tokens: &[Token]) -> Result<Expr, ParseError> {
    parse_with_spans(tokens).map(|(e, _)| e)
}

pub fn parse_with_spans(tokens: &[Token]) -> Result<(Expr, SpanTable), ParseError> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    p.finish()?;
    Ok((e, p.spans))
}

/// Parses a sequence of `def` declarations with no trailing expression.
pub fn parse_defs(tokens: &[Token]) -> Result<Vec<(Name, Expr)>, ParseError> {
    let mut p = Parser::new(tokens);
    let mut out = Vec::new();
    while p.peek().is_some() {
        let def = p.def_head()?;
        p.eat(Punct::Semi);
        out.push(def);
    }
    Ok(out)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    used: HashSet<String>,
    fresh: u32,
    spans: SpanTable,
}

fn describe(t: Option<&Token>) -> String {
    match t {
        Some(t) => format!("`{}`", t.lexeme),
        None => "end of input".to_string(),
    }
}

fn negate(v: LocalValue) -> Option<LocalValue> {
    match v {
        LocalValue::Real(r) => Some(LocalValue::Real(-r)),
        _ => None,
    }
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        let used = tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Ident)
            .map(|t| t.lexeme.clone())
            .collect();
        Parser {
            tokens,
            pos: 0,
            used,
            fresh: 0,
            spans: SpanTable::default(),
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + k)
    }

    fn here(&self) -> Span {
        match self.peek() {
            Some(t) => t.span,
            None => match self.tokens.last() {
                Some(t) => Span {
                    line: t.span.line,
                    col: t.span.col + t.lexeme.chars().count() as u32,
                },
                None => Span { line: 1, col: 1 },
            },
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let message = format!(
            "expected {}, found {}",
            expected.join(" or "),
            describe(self.peek())
        );
        ParseError {
            span: self.here(),
            message,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn at_punct(&self, p: Punct) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn eat(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: Punct, what: &str) -> Result<(), ParseError> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(Arc::from(t.lexeme.as_str()))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error(&["end of input"])),
        }
    }

    fn fresh_name(&mut self, prefix: &str) -> Name {
        loop {
            let name = format!("__{prefix}{}", self.fresh);
            self.fresh += 1;
            if self.used.insert(name.clone()) {
                return Arc::from(name);
            }
        }
    }

    fn var(&mut self, name: &str, span: Span) -> Expr {
        self.spans.vars.push(span);
        Expr::var(name)
    }

    fn fun(name: Name, params: Vec<Name>, body: Expr) -> Expr {
        Expr::Fun(Arc::new(FunDef {
            tau: None,
            name,
            params,
            body,
        }))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.at_keyword(Keyword::Val) {
            self.pos += 1;
            let x = self.ident()?;
            self.expect(Punct::Assign, "`=`")?;
            let bound = self.expr()?;
            self.expect(Punct::Semi, "`;`")?;
            let body = self.expr()?;
            return Ok(Expr::Val(x, Box::new(bound), Box::new(body)));
        }
        if self.at_keyword(Keyword::Def) {
            let (name, f) = self.def_head()?;
            self.eat(Punct::Semi);
            let rest = self.expr()?;
            return Ok(Expr::Val(name, Box::new(f), Box::new(rest)));
        }
        self.or()
    }

    /// `def f(params) { body }`, returning the name and the function.
    fn def_head(&mut self) -> Result<(Name, Expr), ParseError> {
        if !self.at_keyword(Keyword::Def) {
            return Err(self.error(&["`def`"]));
        }
        self.pos += 1;
        let name = self.ident()?;
        let params = self.params()?;
        let body = self.braced()?;
        Ok((name.clone(), Self::fun(name, params, body)))
    }

    fn params(&mut self) -> Result<Vec<Name>, ParseError> {
        self.expect(Punct::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.eat(Punct::RParen) {
            loop {
                params.push(self.ident()?);
                if self.eat(Punct::RParen) {
                    break;
                }
                self.expect(Punct::Comma, "`,` or `)`")?;
            }
        }
        Ok(params)
    }

    fn braced(&mut self) -> Result<Expr, ParseError> {
        self.expect(Punct::LBrace, "`{`")?;
        let e = self.expr()?;
        self.expect(Punct::RBrace, "`}`")?;
        Ok(e)
    }

    /// Left-associative binary level. `op` maps the current token to the
    /// builtin it desugars to.
    fn binary(
        &mut self,
        op: fn(&Token) -> Option<&'static str>,
        next: fn(&mut Self) -> Result<Expr, ParseError>,
    ) -> Result<Expr, ParseError> {
        let mark = self.spans.vars.len();
        let mut left = next(self)?;
        while let Some(t) = self.peek() {
            let Some(name) = op(t) else { break };
            self.pos += 1;
            self.spans.vars.insert(mark, t.span);
            let right = next(self)?;
            left = Expr::call(name, vec![left, right]);
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        self.binary(|t| t.is_keyword(Keyword::Or).then_some("lor"), Self::and)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        self.binary(
            |t| t.is_keyword(Keyword::And).then_some("land"),
            Self::comparison,
        )
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        self.binary(
            |t| match t.kind {
                TokenKind::Punct(Punct::Lt) => Some("lt"),
                TokenKind::Punct(Punct::Le) => Some("le"),
                TokenKind::Punct(Punct::EqEq) => Some("eq"),
                _ => None,
            },
            Self::additive,
        )
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        self.binary(
            |t| match t.kind {
                TokenKind::Punct(Punct::Plus) => Some("add"),
                TokenKind::Punct(Punct::Minus) => Some("sub"),
                _ => None,
            },
            Self::multiplicative,
        )
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        self.binary(|t| t.is_punct(Punct::Star).then_some("mul"), Self::postfix)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.eat(Punct::LParen) {
            let mut args = Vec::new();
            if !self.eat(Punct::RParen) {
                loop {
                    args.push(self.expr()?);
                    if self.eat(Punct::RParen) {
                        break;
                    }
                    self.expect(Punct::Comma, "`,` or `)`")?;
                }
            }
            e = Expr::App(Box::new(e), args);
        }
        Ok(e)
    }

    /// A literal token, without a sign.
    fn literal(&self, t: &Token) -> Result<Option<LocalValue>, ParseError> {
        let bad = |what: &str| ParseError {
            span: t.span,
            message: format!("invalid {what} literal `{}`", t.lexeme),
            expected: vec![],
        };
        Ok(Some(match &t.kind {
            TokenKind::Int => LocalValue::Int(t.lexeme.parse().map_err(|_| bad("integer"))?),
            TokenKind::Real => LocalValue::Real(t.lexeme.parse().map_err(|_| bad("real"))?),
            TokenKind::Str(s) => LocalValue::text(s),
            TokenKind::Device(d) => LocalValue::Device(DeviceId(*d)),
            TokenKind::Ident => match t.lexeme.as_str() {
                "true" => LocalValue::Bool(true),
                "false" => LocalValue::Bool(false),
                "unit" => LocalValue::Unit,
                "inf" => LocalValue::Real(f64::INFINITY),
                "nan" => LocalValue::Real(f64::NAN),
                _ => return Ok(None),
            },
            _ => return Ok(None),
        }))
    }

    /// A possibly negative literal.
    fn signed_literal(&mut self) -> Result<Option<LocalValue>, ParseError> {
        let Some(t) = self.peek() else {
            return Ok(None);
        };
        if !t.is_punct(Punct::Minus) {
            let v = self.literal(t)?;
            if v.is_some() {
                self.pos += 1;
            }
            return Ok(v);
        }
        let Some(n) = self.peek_at(1) else {
            return Ok(None);
        };
        let v = match n.kind {
            TokenKind::Int => {
                let text = format!("-{}", n.lexeme);
                LocalValue::Int(text.parse().map_err(|_| ParseError {
                    span: n.span,
                    message: format!("invalid integer literal `{text}`"),
                    expected: vec![],
                })?)
            }
            TokenKind::Real | TokenKind::Ident => match self.literal(n)?.and_then(negate) {
                Some(v) => v,
                None => return Ok(None),
            },
            _ => return Ok(None),
        };
        self.pos += 2;
        Ok(Some(v))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.here();
        if let Some(v) = self.signed_literal()? {
            if self.at_punct(Punct::LBracket) {
                return self.nvalue(v, start);
            }
            return Ok(Expr::Lit(v));
        }
        let Some(t) = self.peek() else {
            return Err(self.error(&["expression"]));
        };
        match &t.kind {
            TokenKind::Ident => {
                self.pos += 1;
                Ok(self.var(&t.lexeme, t.span))
            }
            TokenKind::Punct(Punct::Minus) => {
                self.pos += 1;
                let sub = self.var("sub", t.span);
                let operand = self.postfix()?;
                Ok(Expr::app(sub, vec![Expr::lit(0i64), operand]))
            }
            TokenKind::Keyword(Keyword::Fun) => {
                self.pos += 1;
                let name = self.ident()?;
                let params = self.params()?;
                let body = self.braced()?;
                Ok(Self::fun(name, params, body))
            }
            TokenKind::Keyword(Keyword::If) => self.if_expr(),
            TokenKind::Punct(Punct::LBrace) => self.braced(),
            TokenKind::Punct(Punct::LParen) => {
                if self.lambda_ahead() {
                    let params = self.params()?;
                    self.expect(Punct::Arrow, "`=>`")?;
                    let body = self.expr()?;
                    let name = self.fresh_name("lam");
                    return Ok(Self::fun(name, params, body));
                }
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Punct::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn lambda_ahead(&self) -> bool {
        let mut k = 1;
        if self.peek_at(k).is_some_and(|t| t.kind == TokenKind::Ident) {
            k += 1;
            while self.peek_at(k).is_some_and(|t| t.is_punct(Punct::Comma))
                && self
                    .peek_at(k + 1)
                    .is_some_and(|t| t.kind == TokenKind::Ident)
            {
                k += 2;
            }
        }
        self.peek_at(k).is_some_and(|t| t.is_punct(Punct::RParen))
            && self
                .peek_at(k + 1)
                .is_some_and(|t| t.is_punct(Punct::Arrow))
    }

    /// `if (c) { a } else { b }` becomes `mux(c, () => a, () => b)()`.
    fn if_expr(&mut self) -> Result<Expr, ParseError> {
        let kw = self.bump().expect("caller checked for `if`");
        let mux = self.var("mux", kw.span);
        self.expect(Punct::LParen, "`(`")?;
        let cond = self.expr()?;
        self.expect(Punct::RParen, "`)`")?;
        let then = self.braced()?;
        if !self.at_keyword(Keyword::Else) {
            return Err(self.error(&["`else`"]));
        }
        self.pos += 1;
        let otherwise = if self.at_keyword(Keyword::If) {
            self.if_expr()?
        } else {
            self.braced()?
        };
        let then = Self::fun(self.fresh_name("then"), vec![], then);
        let otherwise = Self::fun(self.fresh_name("else"), vec![], otherwise);
        Ok(Expr::app(
            Expr::app(mux, vec![cond, then, otherwise]),
            vec![],
        ))
    }

    /// `default[#d -> v, ...]`.
    fn nvalue(&mut self, default: LocalValue, start: Span) -> Result<Expr, ParseError> {
        self.expect(Punct::LBracket, "`[`")?;
        let mut w = NValue::local(default);
        if !self.eat(Punct::RBracket) {
            loop {
                let d = match self.peek().map(|t| &t.kind) {
                    Some(TokenKind::Device(d)) => DeviceId(*d),
                    _ => return Err(self.error(&["device literal"])),
                };
                self.pos += 1;
                self.expect(Punct::MapsTo, "`->`")?;
                let v = self
                    .signed_literal()?
                    .ok_or_else(|| self.error(&["literal"]))?;
                w.set(d, v);
                if self.eat(Punct::RBracket) {
                    break;
                }
                self.expect(Punct::Comma, "`,` or `]`")?;
            }
        }
        self.spans.nlits.push(start);
        Ok(Expr::NLit(w))
    }
}
