//! Expressions over state variables and parameters.
//!
//! An [`Expr`] is parsed against a [`VarDecl`] that fixes the order of the
//! state variables and parameters; variables are then referred to by index.
//! Expressions can be evaluated over intervals (natural inclusion function),
//! at a point, and differentiated symbolically with respect to a state
//! variable.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' ['-'] integer)*
//! primary := number | ident | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'sqrt' | 'sqr'
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    State(usize),
    Param(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Sqr(Box<Expr>),
    Sqrt(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    PowInt(Box<Expr>, i32),
}

/// Names of the state variables and parameters, in index order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarDecl {
    pub states: Vec<String>,
    pub params: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    State(usize),
    Param(usize),
}

impl VarDecl {
    pub fn new<S: Into<String>>(
        states: impl IntoIterator<Item = S>,
        params: impl IntoIterator<Item = S>,
    ) -> VarDecl {
        VarDecl {
            states: states.into_iter().map(Into::into).collect(),
            params: params.into_iter().map(Into::into).collect(),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(i) = self.states.iter().position(|s| s == name) {
            return Some(Var::State(i));
        }
        self.params.iter().position(|s| s == name).map(Var::Param)
    }
}

/// The boxes an expression is evaluated over.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a> {
    pub state: &'a [Interval],
    pub params: &'a [Interval],
}

impl<'a> Env<'a> {
    pub fn new(state: &'a [Interval], params: &'a [Interval]) -> Env<'a> {
        Env { state, params }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprError {
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {expected} components, found {found}"
            ),
        }
    }
}

impl core::error::Error for ExprError {}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    /// Natural interval extension. An empty component anywhere in the
    /// environment makes the result empty.
    ///
    /// # Panics
    ///
    /// Panics if a variable index is outside the environment.
    pub fn eval_interval(&self, env: &Env<'_>) -> Interval {
        if env.state.iter().chain(env.params).any(|c| c.is_empty()) {
            return Interval::EMPTY;
        }
        self.eval_rec(env)
    }

    fn eval_rec(&self, env: &Env<'_>) -> Interval {
        match self {
            Expr::Const(c) => Interval::point(*c),
            Expr::State(i) => env.state[*i],
            Expr::Param(i) => env.params[*i],
            Expr::Add(a, b) => a.eval_rec(env) + b.eval_rec(env),
            Expr::Sub(a, b) => a.eval_rec(env) - b.eval_rec(env),
            Expr::Mul(a, b) => a.eval_rec(env) * b.eval_rec(env),
            Expr::Div(a, b) => a.eval_rec(env) / b.eval_rec(env),
            Expr::Neg(a) => -a.eval_rec(env),
            Expr::Sqr(a) => a.eval_rec(env).sqr(),
            Expr::Sqrt(a) => a.eval_rec(env).sqrt(),
            Expr::Sin(a) => a.eval_rec(env).sin(),
            Expr::Cos(a) => a.eval_rec(env).cos(),
            Expr::PowInt(a, n) => a.eval_rec(env).powi(*n),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval_point(&self, x: &[f64], p: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::State(i) => x[*i],
            Expr::Param(i) => p[*i],
            Expr::Add(a, b) => a.eval_point(x, p) + b.eval_point(x, p),
            Expr::Sub(a, b) => a.eval_point(x, p) - b.eval_point(x, p),
            Expr::Mul(a, b) => a.eval_point(x, p) * b.eval_point(x, p),
            Expr::Div(a, b) => a.eval_point(x, p) / b.eval_point(x, p),
            Expr::Neg(a) => -a.eval_point(x, p),
            Expr::Sqr(a) => {
                let v = a.eval_point(x, p);
                v * v
            }
            Expr::Sqrt(a) => libm::sqrt(a.eval_point(x, p)),
            Expr::Sin(a) => libm::sin(a.eval_point(x, p)),
            Expr::Cos(a) => libm::cos(a.eval_point(x, p)),
            Expr::PowInt(a, n) => powi_point(a.eval_point(x, p), *n),
        }
    }

    /// Symbolic partial derivative with respect to state variable `var`.
    /// Only zero/one constants are folded.
    pub fn differentiate(&self, var: usize) -> Expr {
        use Expr::*;
        match self {
            Const(_) | Param(_) => Const(0.0),
            State(i) => Const(if *i == var { 1.0 } else { 0.0 }),
            Add(a, b) => add(a.differentiate(var), b.differentiate(var)),
            Sub(a, b) => sub(a.differentiate(var), b.differentiate(var)),
            Mul(a, b) => add(
                mul(a.differentiate(var), (**b).clone()),
                mul((**a).clone(), b.differentiate(var)),
            ),
            Div(a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                if db.is_zero() {
                    div(da, (**b).clone())
                } else {
                    div(
                        sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                        Sqr(b.clone()),
                    )
                }
            }
            Neg(a) => neg(a.differentiate(var)),
            Sqr(a) => mul(mul(Const(2.0), (**a).clone()), a.differentiate(var)),
            Sqrt(a) => div(a.differentiate(var), mul(Const(2.0), Sqrt(a.clone()))),
            Sin(a) => mul(Cos(a.clone()), a.differentiate(var)),
            Cos(a) => neg(mul(Sin(a.clone()), a.differentiate(var))),
            PowInt(a, n) => {
                let da = a.differentiate(var);
                match *n {
                    0 => Const(0.0),
                    n => mul(mul(Const(n as f64), powi((**a).clone(), n - 1)), da),
                }
            }
        }
    }

    /// Largest state index used plus one.
    pub fn state_arity(&self) -> usize {
        let mut n = 0;
        self.visit_vars(&mut |v| {
            if let Var::State(i) = v {
                n = n.max(i + 1);
            }
        });
        n
    }

    /// Sorted, deduplicated parameter indices the expression refers to.
    pub fn params_used(&self) -> Vec<usize> {
        let mut used = Vec::new();
        self.visit_vars(&mut |v| {
            if let Var::Param(i) = v {
                used.push(i);
            }
        });
        used.sort_unstable();
        used.dedup();
        used
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Const(_) => {}
            Expr::State(i) => f(Var::State(*i)),
            Expr::Param(i) => f(Var::Param(*i)),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Expr::Neg(a)
            | Expr::Sqr(a)
            | Expr::Sqrt(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::PowInt(a, _) => a.visit_vars(f),
        }
    }

    /// Formats the expression with the variable names of `decl`.
    pub fn display<'a>(&'a self, decl: &'a VarDecl) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, decl }
    }
}

fn powi_point(x: f64, n: i32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    if n < 0 {
        1.0 / acc
    } else {
        acc
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        b
    } else if b.is_zero() {
        a
    } else {
        Expr::Add(Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        a
    } else if a.is_zero() {
        neg(b)
    } else {
        Expr::Sub(Box::new(a), Box::new(b))
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        Expr::Const(0.0)
    } else if a.is_one() {
        b
    } else if b.is_one() {
        a
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        Expr::Const(0.0)
    } else if b.is_one() {
        a
    } else {
        Expr::Div(Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn powi(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Const(1.0),
        1 => a,
        n => Expr::PowInt(Box::new(a), n),
    }
}

/// `dc/dx · f`: the Lie derivative of `c` along the vector field `field`,
/// which must have `state_dim` components.
pub fn lie_derivative(c: &Expr, field: &[Expr], state_dim: usize) -> Result<Expr, ExprError> {
    if field.len() != state_dim {
        return Err(ExprError::DimensionMismatch {
            expected: state_dim,
            found: field.len(),
        });
    }
    if c.state_arity() > state_dim {
        return Err(ExprError::DimensionMismatch {
            expected: state_dim,
            found: c.state_arity(),
        });
    }
    Ok(field
        .iter()
        .enumerate()
        .map(|(i, fi)| mul(c.differentiate(i), fi.clone()))
        .fold(Expr::Const(0.0), add))
}

// ---------------------------------------------------------------------------
// Printing

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    decl: &'a VarDecl,
}

// Binding strength, used to decide where parentheses are needed.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
        Expr::PowInt(..) => 4,
        _ => 5,
    }
}

impl ExprDisplay<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        if precedence(e) < min_prec {
            write!(f, "({})", e.display(self.decl))
        } else {
            write!(f, "{}", e.display(self.decl))
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: &Vec<String>, i: usize, prefix: char| -> String {
            v.get(i)
                .cloned()
                .unwrap_or_else(|| alloc::format!("{prefix}{i}"))
        };
        match self.expr {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::State(i) => f.write_str(&name(&self.decl.states, *i, '$')),
            Expr::Param(i) => f.write_str(&name(&self.decl.params, *i, '@')),
            Expr::Add(a, b) => {
                self.child(f, a, 1)?;
                f.write_str(" + ")?;
                self.child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                self.child(f, a, 1)?;
                f.write_str(" - ")?;
                self.child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                self.child(f, a, 2)?;
                f.write_str("*")?;
                self.child(f, b, 3)
            }
            Expr::Div(a, b) => {
                self.child(f, a, 2)?;
                f.write_str("/")?;
                self.child(f, b, 3)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                self.child(f, a, 3)
            }
            Expr::PowInt(a, n) => {
                self.child(f, a, 5)?;
                write!(f, "^{n}")
            }
            Expr::Sqr(a) => write!(f, "sqr({})", a.display(self.decl)),
            Expr::Sqrt(a) => write!(f, "sqrt({})", a.display(self.decl)),
            Expr::Sin(a) => write!(f, "sin({})", a.display(self.decl)),
            Expr::Cos(a) => write!(f, "cos({})", a.display(self.decl)),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnknownIdentifier(String),
    UnknownFunction(String),
    InvalidNumber(String),
    InvalidExponent,
}

/// A parse failure at a 1-based line and column (columns count characters).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    /// Moves a position computed on a fragment to where the fragment starts
    /// inside a larger text.
    pub fn offset(mut self, line: usize, column: usize) -> ParseError {
        if self.line == 1 {
            self.column += column - 1;
        }
        self.line += line - 1;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.kind)
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found '{found}'")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier '{name}'"),
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function '{name}'"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
            ParseErrorKind::InvalidExponent => f.write_str("exponent must be an integer literal"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Int(i64),
    Sym(char),
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Int(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Sym(c) => c.to_string(),
        }
    }
}

struct Token {
    tok: Tok,
    offset: usize,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for ch in text[..offset].chars() {
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

fn tokenize(text: &str) -> Result<Vec<Token>, (ParseErrorKind, usize)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit()
            || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit))
        {
            let start = i;
            let mut is_int = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                is_int = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_int = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let value: f64 = s
                .parse()
                .map_err(|_| (ParseErrorKind::InvalidNumber(s.to_string()), start))?;
            let tok = match (is_int, s.parse::<i64>()) {
                (true, Ok(n)) => Tok::Int(n),
                _ => Tok::Num(value),
            };
            out.push(Token { tok, offset: start });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
            });
        } else if b"+-*/^(),".contains(&c) {
            out.push(Token {
                tok: Tok::Sym(c as char),
                offset: i,
            });
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err((ParseErrorKind::UnexpectedChar(ch), i));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    decl: &'a VarDecl,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind, offset: usize) -> ParseError {
        let (line, column) = position(self.text, offset);
        ParseError { kind, line, column }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.text.len(), |t| t.offset)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(
                ParseErrorKind::UnexpectedToken {
                    found: t.text(),
                    expected,
                },
                self.offset(),
            ),
            None => self.error(ParseErrorKind::UnexpectedEnd { expected }, self.offset()),
        }
    }

    fn expect_sym(&mut self, c: char, expected: &'static str) -> Result<(), ParseError> {
        if self.peek_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.peek_sym('+') {
                self.pos += 1;
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.peek_sym('-') {
                self.pos += 1;
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.peek_sym('*') {
                self.pos += 1;
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek_sym('/') {
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_sym('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.peek_sym('^') {
            self.pos += 1;
            let negative = if self.peek_sym('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = match self.peek() {
                Some(Tok::Int(n)) => *n,
                Some(_) => return Err(self.error(ParseErrorKind::InvalidExponent, self.offset())),
                None => return Err(self.unexpected("integer exponent")),
            };
            let n = if negative { -n } else { n };
            let n = i32::try_from(n)
                .map_err(|_| self.error(ParseErrorKind::InvalidExponent, self.offset()))?;
            self.pos += 1;
            base = Expr::PowInt(Box::new(base), n);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.unexpected("an operand")),
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Expr::Const(n as f64))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')', "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.peek_sym('(') {
                    let wrap: fn(Box<Expr>) -> Expr = match name.as_str() {
                        "sin" => Expr::Sin,
                        "cos" => Expr::Cos,
                        "sqrt" => Expr::Sqrt,
                        "sqr" => Expr::Sqr,
                        _ => return Err(self.error(ParseErrorKind::UnknownFunction(name), offset)),
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_sym(')', "')'")?;
                    return Ok(wrap(Box::new(arg)));
                }
                match self.decl.lookup(&name) {
                    Some(Var::State(i)) => Ok(Expr::State(i)),
                    Some(Var::Param(i)) => Ok(Expr::Param(i)),
                    None => Err(self.error(ParseErrorKind::UnknownIdentifier(name), offset)),
                }
            }
            Tok::Sym(_) => Err(self.unexpected("an operand")),
        }
    }
}

/// Parses `text` against the variable declaration `decl`.
pub fn parse_expr(text: &str, decl: &VarDecl) -> Result<Expr, ParseError> {
    let tokens = tokenize(text).map_err(|(kind, offset)| {
        let (line, column) = position(text, offset);
        ParseError { kind, line, column }
    })?;
    let mut parser = Parser {
        text,
        tokens,
        pos: 0,
        decl,
    };
    let e = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(e)
}

impl core::str::FromStr for VarDecl {
    type Err = ParseError;

    /// Reads `"x1,x2;p1,p2"`: states before the semicolon, parameters after.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (states, params) = s.split_once(';').unwrap_or((s, ""));
        let names = |part: &str| -> Vec<String> {
            part.split(',')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(ToString::to_string)
                .collect()
        };
        Ok(VarDecl {
            states: names(states),
            params: names(params),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn swing_decl() -> VarDecl {
        VarDecl::new(["x1", "x2"], ["p1", "p2", "p3"])
    }

    fn parse(s: &str) -> Expr {
        parse_expr(s, &swing_decl()).unwrap()
    }

    #[test]
    fn parses_single_variable() {
        let decl: VarDecl = "x1,x2;p1".parse().unwrap();
        assert_eq!(parse_expr("x2", &decl).unwrap(), Expr::State(1));
        assert_eq!(parse_expr("p1", &decl).unwrap(), Expr::Param(0));
    }

    #[test]
    fn precedence_rules() {
        // '^' binds tighter than unary minus, which binds tighter than '*'.
        assert_eq!(
            parse("-x1^2"),
            Expr::Neg(Box::new(Expr::PowInt(Box::new(Expr::State(0)), 2)))
        );
        assert_eq!(
            parse("x1 - x2 - 1"),
            Expr::Sub(
                Box::new(Expr::Sub(
                    Box::new(Expr::State(0)),
                    Box::new(Expr::State(1))
                )),
                Box::new(Expr::Const(1.0))
            )
        );
        assert_eq!(
            parse("2*x1 + x2/3"),
            Expr::Add(
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(2.0)),
                    Box::new(Expr::State(0))
                )),
                Box::new(Expr::Div(
                    Box::new(Expr::State(1)),
                    Box::new(Expr::Const(3.0))
                ))
            )
        );
    }

    #[test]
    fn parses_lie_derivative_text() {
        let e = parse("2*x1*x2 + 2*x2*(p1 - sin(x1))");
        let x = [0.3, -0.7];
        let p = [0.05, 0.0, 0.0];
        let want = 2.0 * x[0] * x[1] + 2.0 * x[1] * (p[0] - libm::sin(x[0]));
        assert_eq!(e.eval_point(&x, &p), want);
    }

    #[test]
    fn unknown_identifier_is_named() {
        let err = parse_expr("x1 + q", &swing_decl()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("q".into()));
        assert_eq!((err.line, err.column), (1, 6));
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_expr("x1 +\n  * x2", &swing_decl()).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedToken { .. }));

        let err = parse_expr("(x1 + x2", &swing_decl()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd { .. }));

        let err = parse_expr("x1 ^ 1.5", &swing_decl()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::InvalidExponent);

        let err = parse_expr("tan(x1)", &swing_decl()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("tan".into()));

        let err = parse_expr("x1 $ 2", &swing_decl()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));

        let err = parse_expr("x1 x2", &swing_decl()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedToken { .. }));
    }

    #[test]
    fn number_literals() {
        assert_eq!(parse("0.1"), Expr::Const(0.1));
        assert_eq!(parse("1e-3"), Expr::Const(1e-3));
        assert_eq!(parse(".5"), Expr::Const(0.5));
        assert_eq!(parse("2.5E2"), Expr::Const(250.0));
    }

    #[test]
    fn eval_disk_constraint_with_uncertain_offsets() {
        let e = parse("(x1+p2)^2+(x2+p3)^2-1");
        let small = Interval::new(-0.1, 0.1);
        let state = [small, small];
        let params = [Interval::ZERO, small, small];
        let r = e.eval_interval(&Env::new(&state, &params));
        // (x+p) in [-0.2,0.2], square in [0,0.04]; a few ulps of outward rounding.
        assert!(
            r.is_subset(Interval::new(-1.0 - 1e-12, -0.92 + 1e-12)),
            "{r}"
        );
        assert!(r.hi() >= -0.92);
        assert!(r.contains(-1.0));
    }

    #[test]
    fn eval_at_origin_contains_zero() {
        let e = parse("2*x1*x2 + 2*x2*(p1 - sin(x1))");
        let state = [Interval::ZERO, Interval::point(1.0)];
        let params = [Interval::ZERO; 3];
        assert!(e.eval_interval(&Env::new(&state, &params)).contains(0.0));
    }

    #[test]
    fn eval_on_empty_box_is_empty() {
        let e = parse("1 + 0*x1");
        let state = [Interval::EMPTY, Interval::ZERO];
        let params = [Interval::ZERO; 3];
        assert!(e.eval_interval(&Env::new(&state, &params)).is_empty());
    }

    #[test]
    fn derivative_examples() {
        let d = parse("x1^2+x2^2-1").differentiate(0);
        assert_eq!(
            d,
            Expr::Mul(Box::new(Expr::Const(2.0)), Box::new(Expr::State(0)))
        );
        assert_eq!(
            parse("sin(x1)").differentiate(0),
            Expr::Cos(Box::new(Expr::State(0)))
        );
        assert!(parse("p1 - sin(x1)").differentiate(1).is_zero());
    }

    #[test]
    fn lie_derivative_of_swing_constraints() {
        let decl = swing_decl();
        let fa = vec![parse("x2"), parse("p1 - sin(x1)")];
        let fb = vec![parse("x2"), parse("p1 - sin(x1) - x2")];

        let la = lie_derivative(&parse("x1^2+x2^2-1"), &fa, 2).unwrap();
        assert_eq!(
            format!("{}", la.display(&decl)),
            "2*x1*x2 + 2*x2*(p1 - sin(x1))"
        );

        let lb = lie_derivative(&parse("x2+0.2"), &fb, 2).unwrap();
        assert_eq!(format!("{}", lb.display(&decl)), "p1 - sin(x1) - x2");

        assert!(lie_derivative(&Expr::Const(-1.0), &fa, 2)
            .unwrap()
            .is_zero());
        assert_eq!(
            lie_derivative(&parse("x1"), &fa[..1], 2),
            Err(ExprError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn display_round_trips_through_parser() {
        for s in [
            "-(x1 + x2)*p1",
            "x1 - (x2 - p1)",
            "x1/(x2*p1)",
            "(-x1)^3 + sqr(x2) - sqrt(p1)",
            "-x1^2",
            "2*x1*-1",
            "cos(x1)/2^-1",
        ] {
            let e = parse(s);
            let printed = format!("{}", e.display(&swing_decl()));
            assert_eq!(parse(&printed), e, "{s} printed as {printed}");
        }
    }

    #[test]
    fn params_used_and_arity() {
        let e = parse("(x1+p2)^2+(x2+p3)^2-1");
        assert_eq!(e.params_used(), vec![1, 2]);
        assert_eq!(e.state_arity(), 2);
        assert_eq!(parse("p1").state_arity(), 0);
    }
}
