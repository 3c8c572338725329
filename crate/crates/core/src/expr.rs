//! The closed expression language used for drift components and data.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := ('-' | '+') unary | atom
//! atom  := number | 'pi' | 'x'<k> | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `x1 .. xn` (1-based in the text, 0-based in [`Expr::Var`]).
//! Nothing else is accepted, so every expression is smooth; periodicity on the
//! `2π` torus still depends on the frequencies and is checked separately by
//! [`Expr::periodicity_defect`].

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Const(value)
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        parse_at(text, dim, 1, 1)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Sin(a) => a.eval(x).sin(),
            Expr::Cos(a) => a.eval(x).cos(),
        }
    }

    /// True when no variable occurs after simplification.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Symbolic partial derivative with respect to the 0-based variable `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(i) => Expr::Const(if *i == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.derivative(var)),
            Expr::Add(a, b) => add(a.derivative(var), b.derivative(var)),
            Expr::Sub(a, b) => sub(a.derivative(var), b.derivative(var)),
            Expr::Mul(a, b) => add(
                mul(a.derivative(var), (**b).clone()),
                mul((**a).clone(), b.derivative(var)),
            ),
            Expr::Sin(a) => mul(cos((**a).clone()), a.derivative(var)),
            Expr::Cos(a) => neg(mul(sin((**a).clone()), a.derivative(var))),
        }
    }

    /// Largest `|e(x + 2π e_axis) - e(x)|` over the given sample points.
    pub fn periodicity_defect(&self, points: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in points {
            let base = self.eval(x);
            for axis in 0..x.len() {
                let mut shifted = x.clone();
                shifted[axis] += 2.0 * PI;
                worst = worst.max((self.eval(&shifted) - base).abs());
            }
        }
        worst
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) if a.is_zero() => b,
        (a, b) if b.is_zero() => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) if b.is_zero() => a,
        (a, b) if a.is_zero() => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, _) if a.is_zero() => Expr::Const(0.0),
        (_, b) if b.is_zero() => Expr::Const(0.0),
        (Expr::Const(1.0), b) => b,
        (a, Expr::Const(1.0)) => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn sin(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(c.sin()),
        other => Expr::Sin(Box::new(other)),
    }
}

fn cos(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(c.cos()),
        other => Expr::Cos(Box::new(other)),
    }
}

impl Expr {
    /// Binding strength when printed: sums 1, products 2, negations 3, atoms 4.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            _ => 4,
        }
    }

    fn all_finite(&self) -> bool {
        match self {
            Expr::Const(c) => c.is_finite(),
            Expr::Var(_) => true,
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) => a.all_finite(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.all_finite() && b.all_finite(),
        }
    }
}

struct Child<'a>(&'a Expr, bool);

fn wrap(e: &Expr, min: u8) -> Child<'_> {
    Child(e, e.precedence() < min)
}

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Prints with only the parentheses needed to parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", wrap(a, 2), wrap(b, 3)),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

struct Lexed {
    token: Token,
    column: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Lexed>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let column = col0 + i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(token) = single {
            out.push(Lexed { token, column });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let literal = &text[start..i];
            let value: f64 = literal
                .parse()
                .map_err(|_| Error::parse(line, column, format!("invalid number `{literal}`")))?;
            out.push(Lexed {
                token: Token::Number(value),
                column,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Lexed {
                token: Token::Ident(text[start..i].to_string()),
                column,
            });
            continue;
        }
        let ch = text[i..].chars().next().unwrap_or('?');
        return Err(Error::parse(
            line,
            column,
            format!("unexpected character `{ch}`"),
        ));
    }
    Ok(out)
}

/// Deepest accepted nesting of parentheses, function calls and unary signs.
pub const MAX_NESTING: usize = 64;
/// Longest accepted expression, in tokens. Binary chains build trees this deep.
pub const MAX_TOKENS: usize = 1024;

struct Parser<'a> {
    tokens: &'a [Lexed],
    pos: usize,
    depth: usize,
    dim: usize,
    line: usize,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.token)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_column, |t| t.column)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, self.column(), message)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = add(acc, self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = mul(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(neg(self.nested(Self::unary)?))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.nested(Self::unary)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let column = self.column();
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.nested(Self::expr)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => Ok(Expr::Const(PI)),
                    "sin" | "cos" => {
                        if self.peek() != Some(&Token::LParen) {
                            return Err(self.error(format!("expected `(` after `{name}`")));
                        }
                        self.pos += 1;
                        let arg = self.nested(Self::expr)?;
                        self.expect_rparen()?;
                        Ok(if name == "sin" { sin(arg) } else { cos(arg) })
                    }
                    _ => {
                        if let Some(digits) = name.strip_prefix('x') {
                            if let Ok(k) = digits.parse::<usize>() {
                                if (1..=self.dim).contains(&k) && !digits.starts_with('0') {
                                    return Ok(Expr::Var(k - 1));
                                }
                                return Err(Error::parse(
                                    self.line,
                                    column,
                                    format!("variable `{name}` out of range x1..x{}", self.dim),
                                ));
                            }
                        }
                        Err(Error::parse(
                            self.line,
                            column,
                            format!("unknown token `{name}`"),
                        ))
                    }
                }
            }
            Some(other) => Err(self.error(format!("unexpected {other:?}"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn nested<T>(&mut self, inner: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        if self.depth == MAX_NESTING {
            return Err(self.error(format!("nesting deeper than {MAX_NESTING}")));
        }
        self.depth += 1;
        let out = inner(self);
        self.depth -= 1;
        out
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("expected `)`"))
        }
    }
}

/// Parses `text` whose first character sits at `(line, column)` of a larger document.
pub fn parse_at(text: &str, dim: usize, line: usize, column: usize) -> Result<Expr> {
    let tokens = lex(text, line, column)?;
    if tokens.len() > MAX_TOKENS {
        return Err(Error::parse(
            line,
            tokens[MAX_TOKENS].column,
            format!("expression longer than {MAX_TOKENS} tokens"),
        ));
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        depth: 0,
        dim,
        line,
        end_column: column + text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    if !expr.all_finite() {
        return Err(Error::parse(line, column, "constant overflows f64"));
    }
    Ok(expr)
}
