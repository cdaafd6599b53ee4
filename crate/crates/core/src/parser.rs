//! Statement text front end.
//!
//! ```text
//! stmt   := ident ('=' | '+=' | '-=') expr
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ident | number | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'log'
//! ```
//!
//! `*` is resolved from the kinds of the names in the workspace: a scalar
//! operand makes a scalar product, a matrix on the left a matrix-vector
//! product. There is no unary minus; write `0*x`, `-=`, or reorder terms.
//! `#` starts a comment. Columns in errors are 1-based.

use std::fmt;

use thiserror::Error;

use crate::expr::{
    build_add, build_func, build_matvec, build_scalmul, build_sub, Expr, ExprError, FuncId, Kind,
};
use crate::kernels::Workspace;
use crate::lower::{AssignMode, Statement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Number,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Eq,
    PlusEq,
    MinusEq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based column of the first character.
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("invalid character `{0}`")]
    InvalidChar(char),
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{0}` is a function name and must be called")]
    ReservedName(String),
    #[error("destination `{0}` is not a vector")]
    BadDestination(String),
    #[error("cannot multiply {left} by {right}")]
    BadProduct { left: Kind, right: Kind },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {pos}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, pos: usize) -> Self {
        ParseError { kind, pos }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits one statement line into tokens, stopping at `#`.
pub fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let tok = |kind, text: &str, start: usize| Token {
        kind,
        text: text.to_string(),
        pos: start + 1,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '+' | '-' if chars.get(i + 1) == Some(&'=') => {
                let kind = if c == '+' {
                    TokenKind::PlusEq
                } else {
                    TokenKind::MinusEq
                };
                tokens.push(tok(kind, &format!("{c}="), start));
                i += 2;
            }
            '+' | '-' | '*' | '(' | ')' | ',' | '=' => {
                let kind = match c {
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    _ => TokenKind::Eq,
                };
                tokens.push(tok(kind, &c.to_string(), start));
                i += 1;
            }
            c if is_ident_start(c) => {
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                tokens.push(tok(TokenKind::Ident, &text, start));
            }
            c if c.is_ascii_digit() || c == '.' => {
                i = scan_number(&chars, start);
                let text: String = chars[start..i].iter().collect();
                let bad = text.parse::<f64>().is_err()
                    || text.ends_with('.')
                    || text.starts_with('.')
                    || chars.get(i).is_some_and(|&c| is_ident_char(c) || c == '.');
                if bad {
                    let mut end = i;
                    while end < chars.len() && (is_ident_char(chars[end]) || chars[end] == '.') {
                        end += 1;
                    }
                    let text: String = chars[start..end].iter().collect();
                    return Err(ParseError::new(
                        ParseErrorKind::MalformedNumber(text),
                        start + 1,
                    ));
                }
                tokens.push(tok(TokenKind::Number, &text, start));
            }
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::InvalidChar(other),
                    start + 1,
                ));
            }
        }
    }
    Ok(tokens)
}

/// Scans `digits [. digits] [e [+-] digits]` and returns the end index.
fn scan_number(chars: &[char], start: usize) -> usize {
    let digits = |mut i: usize| {
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    let mut i = digits(start);
    if chars.get(i) == Some(&'.') {
        i = digits(i + 1);
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        let mut j = i + 1;
        if matches!(chars.get(j), Some('+' | '-')) {
            j += 1;
        }
        let k = digits(j);
        // `2e` or `2e+` leaves the exponent marker to be reported as malformed.
        i = if k > j { k } else { j };
    }
    i
}

struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
    env: &'a Workspace,
    end_pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.at)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end_pos, |t| t.pos)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        };
        ParseError::new(
            ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found,
            },
            self.pos(),
        )
    }

    fn eat(&mut self, kind: TokenKind) -> Option<&'a Token> {
        let t = self.peek().filter(|t| t.kind == kind)?;
        self.at += 1;
        Some(t)
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'a Token, ParseError> {
        self.eat(kind).ok_or_else(|| self.unexpected(what))
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let dst = self.expect(TokenKind::Ident, "a destination name")?;
        match self.env.kind_of(&dst.text) {
            Some(Kind::Vector) => {}
            Some(_) => {
                return Err(ParseError::new(
                    ParseErrorKind::BadDestination(dst.text.clone()),
                    dst.pos,
                ))
            }
            None => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownName(dst.text.clone()),
                    dst.pos,
                ))
            }
        }
        let mode = if self.eat(TokenKind::Eq).is_some() {
            AssignMode::Assign
        } else if self.eat(TokenKind::PlusEq).is_some() {
            AssignMode::PlusAssign
        } else if self.eat(TokenKind::MinusEq).is_some() {
            AssignMode::MinusAssign
        } else {
            return Err(self.unexpected("`=`, `+=` or `-=`"));
        };
        let rhs = self.expr()?;
        if self.peek().is_some() {
            return Err(self.unexpected("end of statement"));
        }
        Ok(Statement::new(dst.text.clone(), mode, rhs))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let build = if self.eat(TokenKind::Plus).is_some() {
                build_add
            } else if self.eat(TokenKind::Minus).is_some() {
                build_sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = build(lhs, rhs).map_err(|e| ParseError::new(e.into(), pos))?;
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(star) = self.eat(TokenKind::Star) {
            let rhs = self.factor()?;
            let wrap = |e: ExprError| ParseError::new(e.into(), star.pos);
            lhs = match (lhs.kind(), rhs.kind()) {
                (Kind::Scalar, Kind::Scalar) | (Kind::Vector, Kind::Vector) => {
                    return Err(ParseError::new(
                        ParseErrorKind::BadProduct {
                            left: lhs.kind(),
                            right: rhs.kind(),
                        },
                        star.pos,
                    ))
                }
                (Kind::Scalar, _) | (_, Kind::Scalar) => build_scalmul(lhs, rhs).map_err(wrap)?,
                (Kind::Matrix, _) => build_matvec(lhs, rhs).map_err(wrap)?,
                (left, right) => {
                    return Err(ParseError::new(
                        ParseErrorKind::BadProduct { left, right },
                        star.pos,
                    ))
                }
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some(num) = self.eat(TokenKind::Number) {
            let value = num.text.parse::<f64>().map_err(|_| {
                ParseError::new(ParseErrorKind::MalformedNumber(num.text.clone()), num.pos)
            })?;
            return Ok(Expr::scalar(value));
        }
        if self.eat(TokenKind::LParen).is_some() {
            let inner = self.expr()?;
            self.expect(TokenKind::RParen, "`)`")?;
            return Ok(inner);
        }
        let Some(id) = self.eat(TokenKind::Ident) else {
            return Err(self.unexpected("a name, number or `(`"));
        };
        let func = FuncId::from_name(&id.text);
        if self.eat(TokenKind::LParen).is_some() {
            let Some(func) = func else {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownFunction(id.text.clone()),
                    id.pos,
                ));
            };
            let arg = self.expr()?;
            self.expect(TokenKind::RParen, "`)`")?;
            return build_func(func, arg).map_err(|e| ParseError::new(e.into(), id.pos));
        }
        if func.is_some() {
            return Err(ParseError::new(
                ParseErrorKind::ReservedName(id.text.clone()),
                id.pos,
            ));
        }
        match self.env.kind_of(&id.text) {
            Some(Kind::Vector) => Ok(Expr::vector(&id.text)),
            Some(Kind::Matrix) => Ok(Expr::matrix(&id.text)),
            Some(Kind::Scalar) => Ok(Expr::scalar(id.text.as_str())),
            None => Err(ParseError::new(
                ParseErrorKind::UnknownName(id.text.clone()),
                id.pos,
            )),
        }
    }
}

/// Parses a token stream into a statement, resolving name kinds in `env`.
pub fn parse(tokens: &[Token], env: &Workspace) -> Result<Statement, ParseError> {
    let end_pos = tokens.last().map_or(1, |t| t.pos + t.text.chars().count());
    Parser {
        tokens,
        at: 0,
        env,
        end_pos,
    }
    .statement()
}

pub fn parse_statement(input: &str, env: &Workspace) -> Result<Statement, ParseError> {
    parse(&tokenize(input)?, env)
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
