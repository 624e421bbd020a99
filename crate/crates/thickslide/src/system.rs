//! System definition files.
//!
//! A `.sys` file is line oriented; `#` starts a comment.
//!
//! ```text
//! state x1 x2
//! param p1 in [-0.1, 0.1]
//! field a : (x2, p1 - sin(x1))
//! field b : (x2, p1 - sin(x1) - x2)
//! set A1 := x1^2 + x2^2 - 1 <= 0
//! region := A1
//! domain [-2, 2] x [-2, 2]
//! epsilon 0.02
//! ```
//!
//! `region` combines named sets with `&` (and), `|` (or), `!` (not) and
//! parentheses. A negation is pushed down to the leaves, where `!(c <= 0)`
//! becomes `-c <= 0`. Declarations may appear in any order. `domain`
//! defaults to `[-2, 2]` per state and `epsilon` to 0.02.

use std::fmt;

use thickslide_core::expr::{parse_expr, Expr, ParseError, ParseErrorKind, VarDecl};
use thickslide_core::interval::{Interval, IntervalBox};
use thickslide_core::sliding::{build_sliding, RegionTree, SlidingError, SlidingSpec};
use thickslide_core::thickset::SetExpr;

pub const DEFAULT_EPSILON: f64 = 0.02;
pub const DEFAULT_DOMAIN: (f64, f64) = (-2.0, 2.0);

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDef {
    pub states: Vec<String>,
    pub params: Vec<(String, Interval)>,
    pub field_a: Vec<Expr>,
    pub field_b: Vec<Expr>,
    /// Named sets `name := c <= 0`, in file order.
    pub sets: Vec<(String, Expr)>,
    pub region: RegionTree,
    pub domain: IntervalBox,
    pub epsilon: f64,
}

impl SystemDef {
    pub fn decl(&self) -> VarDecl {
        VarDecl::new(
            self.states.iter().map(String::as_str),
            self.params.iter().map(|(n, _)| n.as_str()),
        )
    }

    pub fn param_box(&self) -> IntervalBox {
        IntervalBox::new(self.params.iter().map(|(_, r)| *r).collect())
    }

    pub fn spec(&self) -> SlidingSpec {
        SlidingSpec {
            region: self.region.clone(),
            field_a: self.field_a.clone(),
            field_b: self.field_b.clone(),
        }
    }

    pub fn sliding_set(&self) -> Result<SetExpr, SlidingError> {
        build_sliding(&self.spec())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SystemErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared identifier '{0}'")]
    Undeclared(String),
    #[error("{what} has {found} components, expected {expected}")]
    Arity {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("parameter '{0}' has an empty interval")]
    EmptyInterval(String),
    #[error("'{0}' is declared twice")]
    Duplicate(String),
    #[error("missing '{0}' declaration")]
    Missing(&'static str),
}

/// A diagnostic at a 1-based line and column. Line 0 means the whole file.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct SystemError {
    pub kind: SystemErrorKind,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}: ", self.line, self.column)?;
        }
        write!(f, "{}", self.kind)
    }
}

impl From<ParseError> for SystemError {
    fn from(e: ParseError) -> SystemError {
        let kind = match e.kind {
            ParseErrorKind::UnknownIdentifier(name) => SystemErrorKind::Undeclared(name),
            other => SystemErrorKind::Syntax(other.to_string()),
        };
        SystemError {
            kind,
            line: e.line,
            column: e.column,
        }
    }
}

// A slice of one line, remembering where it starts.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    // 1-based character column of `text`'s first character.
    column: usize,
}

impl<'a> Span<'a> {
    fn error(&self, kind: SystemErrorKind) -> SystemError {
        SystemError {
            kind,
            line: self.line,
            column: self.column,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> SystemError {
        self.error(SystemErrorKind::Syntax(msg.into()))
    }

    fn slice(&self, start: usize, end: usize) -> Span<'a> {
        Span {
            text: &self.text[start..end],
            line: self.line,
            column: self.column + self.text[..start].chars().count(),
        }
    }

    fn from(&self, start: usize) -> Span<'a> {
        self.slice(start, self.text.len())
    }

    fn trim(&self) -> Span<'a> {
        let start = self.text.len() - self.text.trim_start().len();
        let end = self.text.trim_end().len().max(start);
        self.slice(start, end)
    }

    // Splits off the first whitespace-delimited word.
    fn word(&self) -> (Span<'a>, Span<'a>) {
        let t = self.trim();
        let end = t.text.find(char::is_whitespace).unwrap_or(t.text.len());
        (t.slice(0, end), t.from(end).trim())
    }

    fn expect_prefix(&self, prefix: &str) -> Result<Span<'a>, SystemError> {
        let t = self.trim();
        match t.text.strip_prefix(prefix) {
            Some(_) => Ok(t.from(prefix.len()).trim()),
            None => Err(t.syntax(format!("expected '{prefix}'"))),
        }
    }

    fn expr(&self, decl: &VarDecl) -> Result<Expr, SystemError> {
        let t = self.trim();
        if t.text.is_empty() {
            return Err(t.syntax("expected an expression"));
        }
        parse_expr(t.text, decl).map_err(|e| e.offset(t.line, t.column).into())
    }

    fn number(&self) -> Result<f64, SystemError> {
        let t = self.trim();
        match t.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(t.syntax(format!("invalid number '{}'", t.text))),
        }
    }

    // `[lo, hi]`, returning the bounds and the rest of the span.
    fn bracket(&self) -> Result<((f64, f64), Span<'a>), SystemError> {
        let t = self.trim();
        if !t.text.starts_with('[') {
            return Err(t.syntax("expected '['"));
        }
        let close = t.text.find(']').ok_or_else(|| t.syntax("unclosed '['"))?;
        let inner = t.slice(1, close);
        let comma = inner
            .text
            .find(',')
            .ok_or_else(|| inner.syntax("expected '<lo>, <hi>'"))?;
        let lo = inner.slice(0, comma).number()?;
        let hi = inner.from(comma + 1).number()?;
        Ok(((lo, hi), t.from(close + 1)))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn identifier<'a>(s: Span<'a>) -> Result<&'a str, SystemError> {
    if is_identifier(s.text) {
        Ok(s.text)
    } else {
        Err(s.syntax(format!("invalid name '{}'", s.text)))
    }
}

fn lines(text: &str) -> impl Iterator<Item = Span<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let span = Span {
            text: body,
            line: i + 1,
            column: 1,
        };
        let span = span.trim();
        (!span.text.is_empty()).then_some(span)
    })
}

struct Fields<'a> {
    a: Option<(Span<'a>, Vec<Expr>)>,
    b: Option<(Span<'a>, Vec<Expr>)>,
}

pub fn parse_system(text: &str) -> Result<SystemDef, SystemError> {
    // First pass: variable declarations, so that everything else may refer
    // to them regardless of order.
    let mut states: Option<Vec<String>> = None;
    let mut params: Vec<(String, Interval)> = Vec::new();
    for line in lines(text) {
        let (kw, rest) = line.word();
        match kw.text {
            "state" => {
                if states.is_some() {
                    return Err(kw.error(SystemErrorKind::Duplicate("state".into())));
                }
                let mut names = Vec::new();
                for piece in split_names(rest) {
                    let name = identifier(piece)?;
                    if names.iter().any(|n| n == name) || params.iter().any(|(n, _)| n == name) {
                        return Err(piece.error(SystemErrorKind::Duplicate(name.into())));
                    }
                    names.push(name.to_string());
                }
                if names.is_empty() {
                    return Err(rest.syntax("expected at least one state name"));
                }
                states = Some(names);
            }
            "param" => {
                let (name_span, rest) = rest.word();
                let name = identifier(name_span)?;
                let taken = params.iter().any(|(n, _)| n == name)
                    || states.iter().flatten().any(|n| n == name);
                if taken {
                    return Err(name_span.error(SystemErrorKind::Duplicate(name.into())));
                }
                let (kw_in, rest) = rest.word();
                if kw_in.text != "in" {
                    return Err(kw_in.syntax("expected 'in'"));
                }
                let ((lo, hi), tail) = rest.bracket()?;
                if !tail.trim().text.is_empty() {
                    return Err(tail.trim().syntax("unexpected text after interval"));
                }
                let range = Interval::try_new(lo, hi)
                    .map_err(|_| rest.error(SystemErrorKind::EmptyInterval(name.into())))?;
                params.push((name.to_string(), range));
            }
            _ => {}
        }
    }
    let states = states.ok_or(SystemError {
        kind: SystemErrorKind::Missing("state"),
        line: 0,
        column: 0,
    })?;
    let decl = VarDecl::new(
        states.iter().map(String::as_str),
        params.iter().map(|(n, _)| n.as_str()),
    );
    let param_box = IntervalBox::new(params.iter().map(|(_, r)| *r).collect());

    let mut fields = Fields { a: None, b: None };
    let mut sets: Vec<(String, Expr)> = Vec::new();
    let mut region_src: Option<Span<'_>> = None;
    let mut domain: Option<IntervalBox> = None;
    let mut epsilon: Option<f64> = None;
    for line in lines(text) {
        let (kw, rest) = line.word();
        match kw.text {
            "state" | "param" => {}
            "field" => {
                let (which, rest) = rest.word();
                let slot = match which.text {
                    "a" => &mut fields.a,
                    "b" => &mut fields.b,
                    _ => return Err(which.syntax("expected field 'a' or 'b'")),
                };
                if slot.is_some() {
                    return Err(
                        which.error(SystemErrorKind::Duplicate(format!("field {}", which.text)))
                    );
                }
                let body = rest.expect_prefix(":")?;
                let comps = split_tuple(body)?
                    .into_iter()
                    .map(|s| s.expr(&decl))
                    .collect::<Result<Vec<_>, _>>()?;
                *slot = Some((body, comps));
            }
            "set" => {
                let (name_span, rest) = rest.word();
                let name = identifier(name_span)?;
                if sets.iter().any(|(n, _)| n == name) {
                    return Err(name_span.error(SystemErrorKind::Duplicate(name.into())));
                }
                let body = rest.expect_prefix(":=")?;
                let le = body
                    .text
                    .rfind("<=")
                    .ok_or_else(|| body.syntax("expected '<expr> <= 0'"))?;
                let rhs = body.from(le + 2).trim();
                if rhs.text.parse::<f64>() != Ok(0.0) {
                    return Err(rhs.syntax("the right-hand side of a set must be 0"));
                }
                let c = body.slice(0, le).expr(&decl)?;
                sets.push((name.to_string(), c));
            }
            "region" => {
                if region_src.is_some() {
                    return Err(kw.error(SystemErrorKind::Duplicate("region".into())));
                }
                region_src = Some(rest.expect_prefix(":=")?);
            }
            "domain" => {
                if domain.is_some() {
                    return Err(kw.error(SystemErrorKind::Duplicate("domain".into())));
                }
                domain = Some(parse_domain(rest, states.len())?);
            }
            "epsilon" => {
                if epsilon.is_some() {
                    return Err(kw.error(SystemErrorKind::Duplicate("epsilon".into())));
                }
                let v = rest.number()?;
                if v <= 0.0 {
                    return Err(rest.syntax("epsilon must be positive"));
                }
                epsilon = Some(v);
            }
            other => return Err(kw.syntax(format!("unknown declaration '{other}'"))),
        }
    }

    let missing = |what| SystemError {
        kind: SystemErrorKind::Missing(what),
        line: 0,
        column: 0,
    };
    let field = |slot: Option<(Span<'_>, Vec<Expr>)>, what, name| {
        let (span, comps) = slot.ok_or(missing(name))?;
        if comps.len() != states.len() {
            return Err(span.error(SystemErrorKind::Arity {
                what,
                expected: states.len(),
                found: comps.len(),
            }));
        }
        Ok(comps)
    };
    let field_a = field(fields.a, "field a", "field a")?;
    let field_b = field(fields.b, "field b", "field b")?;
    let region_src = region_src.ok_or(missing("region"))?;
    let region = RegionParser::new(region_src, &sets, &param_box)?.parse()?;
    let domain =
        domain.unwrap_or_else(|| IntervalBox::from_bounds(&vec![DEFAULT_DOMAIN; states.len()]));
    Ok(SystemDef {
        states,
        params,
        field_a,
        field_b,
        sets,
        region,
        domain,
        epsilon: epsilon.unwrap_or(DEFAULT_EPSILON),
    })
}

fn split_names(s: Span<'_>) -> Vec<Span<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.text.char_indices() {
        let sep = ch.is_whitespace() || ch == ',';
        match (sep, start) {
            (true, Some(st)) => {
                out.push(s.slice(st, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push(s.from(st));
    }
    out
}

// `( e1, e2, ... )` split on top-level commas.
fn split_tuple(s: Span<'_>) -> Result<Vec<Span<'_>>, SystemError> {
    let t = s.trim();
    if !t.text.starts_with('(') || !t.text.ends_with(')') || t.text.len() < 2 {
        return Err(t.syntax("expected '( <expr>, ... )'"));
    }
    let inner = t.slice(1, t.text.len() - 1);
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in inner.text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(inner.from(i).syntax("unbalanced ')'"));
                }
            }
            ',' if depth == 0 => {
                parts.push(inner.slice(start, i));
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(inner.syntax("unbalanced '('"));
    }
    parts.push(inner.from(start));
    Ok(parts)
}

fn parse_domain(s: Span<'_>, dim: usize) -> Result<IntervalBox, SystemError> {
    let mut comps = Vec::new();
    let mut rest = s.trim();
    loop {
        let ((lo, hi), tail) = rest.bracket()?;
        let range = Interval::try_new(lo, hi).map_err(|_| rest.syntax("empty domain interval"))?;
        comps.push(range);
        let tail = tail.trim();
        if tail.text.is_empty() {
            break;
        }
        rest = tail.expect_prefix("x")?;
    }
    if comps.len() != dim {
        return Err(s.error(SystemErrorKind::Arity {
            what: "domain",
            expected: dim,
            found: comps.len(),
        }));
    }
    Ok(IntervalBox::new(comps))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum RTok<'a> {
    Name(&'a str),
    And,
    Or,
    Not,
    Open,
    Close,
}

// region := or
// or     := and ('|' and)*
// and    := not ('&' not)*
// not    := '!' not | name | '(' or ')'
struct RegionParser<'a, 's> {
    tokens: Vec<(RTok<'a>, Span<'a>)>,
    pos: usize,
    end: Span<'a>,
    sets: &'s [(String, Expr)],
    params: &'s IntervalBox,
}

impl<'a, 's> RegionParser<'a, 's> {
    fn new(
        src: Span<'a>,
        sets: &'s [(String, Expr)],
        params: &'s IntervalBox,
    ) -> Result<Self, SystemError> {
        let mut tokens = Vec::new();
        let text = src.text;
        let mut iter = text.char_indices().peekable();
        while let Some((i, ch)) = iter.next() {
            let tok = match ch {
                c if c.is_whitespace() => continue,
                '&' => RTok::And,
                '|' => RTok::Or,
                '!' => RTok::Not,
                '(' => RTok::Open,
                ')' => RTok::Close,
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut end = i + c.len_utf8();
                    while let Some(&(j, d)) = iter.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' {
                            end = j + d.len_utf8();
                            iter.next();
                        } else {
                            break;
                        }
                    }
                    tokens.push((RTok::Name(&text[i..end]), src.slice(i, end)));
                    continue;
                }
                c => {
                    return Err(src
                        .from(i)
                        .syntax(format!("unexpected character '{c}' in region")))
                }
            };
            tokens.push((tok, src.slice(i, i + ch.len_utf8())));
        }
        Ok(RegionParser {
            tokens,
            pos: 0,
            end: src.from(text.len()),
            sets,
            params,
        })
    }

    fn parse(mut self) -> Result<RegionTree, SystemError> {
        let tree = self.or()?;
        match self.tokens.get(self.pos) {
            None => Ok(tree),
            Some((_, span)) => Err(span.syntax("unexpected token in region")),
        }
    }

    fn peek(&self) -> Option<RTok<'a>> {
        self.tokens.get(self.pos).map(|(t, _)| *t)
    }

    fn or(&mut self) -> Result<RegionTree, SystemError> {
        let mut items = vec![self.and()?];
        while self.peek() == Some(RTok::Or) {
            self.pos += 1;
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            RegionTree::Or(items)
        })
    }

    fn and(&mut self) -> Result<RegionTree, SystemError> {
        let mut items = vec![self.not()?];
        while self.peek() == Some(RTok::And) {
            self.pos += 1;
            items.push(self.not()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            RegionTree::And(items)
        })
    }

    fn not(&mut self) -> Result<RegionTree, SystemError> {
        let Some((tok, span)) = self.tokens.get(self.pos).copied() else {
            return Err(self.end.syntax("expected a set name"));
        };
        self.pos += 1;
        match tok {
            RTok::Not => Ok(negate(self.not()?)),
            RTok::Name(name) => {
                let (_, c) = self
                    .sets
                    .iter()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| span.error(SystemErrorKind::Undeclared(name.into())))?;
                Ok(RegionTree::leaf(c.clone(), self.params.clone()))
            }
            RTok::Open => {
                let inner = self.or()?;
                match self.tokens.get(self.pos) {
                    Some((RTok::Close, _)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some((_, s)) => Err(s.syntax("expected ')'")),
                    None => Err(self.end.syntax("expected ')'")),
                }
            }
            _ => Err(span.syntax("expected a set name")),
        }
    }
}

// Closed complement: `!(c <= 0)` is `-c <= 0`; groups go through De Morgan.
fn negate(tree: RegionTree) -> RegionTree {
    match tree {
        RegionTree::Leaf { constraint, params } => {
            let flipped = match constraint {
                Expr::Neg(inner) => *inner,
                c => Expr::Neg(Box::new(c)),
            };
            RegionTree::leaf(flipped, params)
        }
        RegionTree::And(items) => RegionTree::Or(items.into_iter().map(negate).collect()),
        RegionTree::Or(items) => RegionTree::And(items.into_iter().map(negate).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "state x1 x2\nparam p1 in [-0.1, 0.1]\n\
                        field a : (x2, p1 - sin(x1))\nfield b : (x2, p1 - sin(x1) - x2)\n\
                        set A := x1^2 + x2^2 - 1 <= 0\nset B := x2 + 0.2 <= 0\n";

    fn with(extra: &str) -> Result<SystemDef, SystemError> {
        parse_system(&format!("{BASE}{extra}"))
    }

    fn c(def: &SystemDef, s: &str) -> Expr {
        parse_expr(s, &def.decl()).unwrap()
    }

    #[test]
    fn defaults() {
        let def = with("region := A\n").unwrap();
        assert_eq!(def.epsilon, DEFAULT_EPSILON);
        assert_eq!(
            def.domain,
            IntervalBox::from_bounds(&[(-2.0, 2.0), (-2.0, 2.0)])
        );
        assert_eq!(def.param_box(), IntervalBox::from_bounds(&[(-0.1, 0.1)]));
    }

    #[test]
    fn region_precedence() {
        let def = with("region := A | !B & A").unwrap();
        let pb = def.param_box();
        let a = RegionTree::leaf(c(&def, "x1^2 + x2^2 - 1"), pb.clone());
        let not_b = RegionTree::leaf(c(&def, "-(x2 + 0.2)"), pb.clone());
        assert_eq!(
            def.region,
            RegionTree::Or(vec![a.clone(), RegionTree::And(vec![not_b, a])])
        );
    }

    #[test]
    fn negated_group_uses_de_morgan() {
        let def = with("region := !(A | !B)").unwrap();
        let pb = def.param_box();
        assert_eq!(
            def.region,
            RegionTree::And(vec![
                RegionTree::leaf(c(&def, "-(x1^2 + x2^2 - 1)"), pb.clone()),
                RegionTree::leaf(c(&def, "x2 + 0.2"), pb),
            ])
        );
    }

    #[test]
    fn positions_are_reported() {
        let err = with("region := A & C\n").unwrap_err();
        assert_eq!(err.kind, SystemErrorKind::Undeclared("C".into()));
        assert_eq!((err.line, err.column), (7, 15));

        let err = with("set C := x1 + q <= 0\nregion := C\n").unwrap_err();
        assert_eq!(err.kind, SystemErrorKind::Undeclared("q".into()));
        assert_eq!((err.line, err.column), (7, 15));
    }

    #[test]
    fn validation_errors() {
        let err = parse_system(
            "state x1 x2\nfield a : (x2, x1)\nfield b : (x2)\nset A := x1 <= 0\nregion := A\n",
        )
        .unwrap_err();
        assert!(matches!(
            err.kind,
            SystemErrorKind::Arity {
                what: "field b",
                expected: 2,
                found: 1
            }
        ));
        assert_eq!(err.line, 3);

        let err = with("param p2 in [0.1, -0.1]\nregion := A\n").unwrap_err();
        assert_eq!(err.kind, SystemErrorKind::EmptyInterval("p2".into()));

        let err = with("region := A\ndomain [0, 1]\n").unwrap_err();
        assert!(matches!(
            err.kind,
            SystemErrorKind::Arity { what: "domain", .. }
        ));

        let err = with("").unwrap_err();
        assert_eq!(err.kind, SystemErrorKind::Missing("region"));

        let err = with("region := A\nepsilon 0\n").unwrap_err();
        assert!(matches!(err.kind, SystemErrorKind::Syntax(_)));

        let err = with("set D := x1 <= 1\nregion := D\n").unwrap_err();
        assert!(matches!(err.kind, SystemErrorKind::Syntax(_)));
    }

    #[test]
    fn comments_and_order() {
        let text = "# leading comment\nregion := A  # trailing\nset A := x1 - p <= 0\n\
                    field b : (1, 0)\nfield a : (-1, 0)\nparam p in [0, 1]\nstate x1 x2\n\
                    domain [0, 1] x [-1, 1]\nepsilon 0.1\n";
        let def = parse_system(text).unwrap();
        assert_eq!(def.states, ["x1", "x2"]);
        assert_eq!(def.epsilon, 0.1);
        assert_eq!(
            def.domain,
            IntervalBox::from_bounds(&[(0.0, 1.0), (-1.0, 1.0)])
        );
    }
}
