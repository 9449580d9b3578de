//! Tokenizer for `.xc` source text.

use std::fmt;

/// 1-based line and column of a token's first character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Fun,
    Val,
    Def,
    If,
    Else,
    And,
    Or,
}

impl Keyword {
    fn from_word(w: &str) -> Option<Keyword> {
        Some(match w {
            "fun" => Keyword::Fun,
            "val" => Keyword::Val,
            "def" => Keyword::Def,
            "if" => Keyword::If,
            "else" => Keyword::Else,
            "and" => Keyword::And,
            "or" => Keyword::Or,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Arrow,
    MapsTo,
    Plus,
    Minus,
    Star,
    Lt,
    Le,
    EqEq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident,
    Int,
    Real,
    /// A string literal, already unescaped.
    Str(String),
    /// `#n`.
    Device(u64),
    Keyword(Keyword),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    pub fn is_punct(&self, p: Punct) -> bool {
        self.kind == TokenKind::Punct(p)
    }

    pub fn is_keyword(&self, k: Keyword) -> bool {
        self.kind == TokenKind::Keyword(k)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|(_, c)| *c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars
            .peek()
            .map(|(i, _)| *i)
            .unwrap_or(self.text.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: text.char_indices().peekable(),
        text,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let span = cur.span();
        let start = cur.offset();
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while cur
                .peek()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                cur.bump();
            }
            match Keyword::from_word(&text[start..cur.offset()]) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident,
            }
        } else if c.is_ascii_digit() {
            number(&mut cur)
        } else if c == '"' {
            TokenKind::Str(string(&mut cur, span)?)
        } else if c == '#' {
            cur.bump();
            let digits = cur.offset();
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            let id = text[digits..cur.offset()]
                .parse::<u64>()
                .map_err(|_| LexError {
                    span,
                    message: "expected a device number after `#`".into(),
                })?;
            TokenKind::Device(id)
        } else {
            cur.bump();
            let p = match c {
                '(' => Punct::LParen,
                ')' => Punct::RParen,
                '{' => Punct::LBrace,
                '}' => Punct::RBrace,
                '[' => Punct::LBracket,
                ']' => Punct::RBracket,
                ',' => Punct::Comma,
                ';' => Punct::Semi,
                '+' => Punct::Plus,
                '*' => Punct::Star,
                '↦' => Punct::MapsTo,
                '=' if cur.peek() == Some('>') => {
                    cur.bump();
                    Punct::Arrow
                }
                '=' if cur.peek() == Some('=') => {
                    cur.bump();
                    Punct::EqEq
                }
                '=' => Punct::Assign,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    Punct::MapsTo
                }
                '-' => Punct::Minus,
                '<' if cur.peek() == Some('=') => {
                    cur.bump();
                    Punct::Le
                }
                '<' => Punct::Lt,
                other => {
                    return Err(LexError {
                        span,
                        message: format!("invalid character `{other}`"),
                    })
                }
            };
            TokenKind::Punct(p)
        };
        out.push(Token {
            kind,
            lexeme: text[start..cur.offset()].to_string(),
            span,
        });
    }
    Ok(out)
}

fn number(cur: &mut Cursor<'_>) -> TokenKind {
    let digits = |cur: &mut Cursor<'_>| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    };
    digits(cur);
    let mut real = false;
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
        real = true;
        cur.bump();
        digits(cur);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut probe = cur.chars.clone();
        probe.next();
        let next = probe.next().map(|(_, c)| c);
        let after_sign = probe.next().map(|(_, c)| c);
        let ok = match next {
            Some(c) if c.is_ascii_digit() => true,
            Some('+' | '-') => after_sign.is_some_and(|c| c.is_ascii_digit()),
            _ => false,
        };
        if ok {
            real = true;
            cur.bump();
            if matches!(cur.peek(), Some('+' | '-')) {
                cur.bump();
            }
            digits(cur);
        }
    }
    if real {
        TokenKind::Real
    } else {
        TokenKind::Int
    }
}

fn string(cur: &mut Cursor<'_>, span: Span) -> Result<String, LexError> {
    cur.bump();
    let mut s = String::new();
    loop {
        match cur.bump() {
            None => {
                return Err(LexError {
                    span,
                    message: "unterminated string".into(),
                })
            }
            Some('"') => return Ok(s),
            Some('\\') => {
                let esc = cur.span();
                match cur.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some(other) => {
                        return Err(LexError {
                            span: esc,
                            message: format!("unknown escape `\\{other}`"),
                        })
                    }
                    None => {
                        return Err(LexError {
                            span,
                            message: "unterminated string".into(),
                        })
                    }
                }
            }
            Some(c) => s.push(c),
        }
    }
}
