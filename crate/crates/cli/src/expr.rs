//! Lattice expressions such as `2*U + 2*E8(-1) + <-50>`.
//!
//! ```text
//! expr := term { "+" term } ;
//! term := [ INT "*" ] atom ;
//! atom := "U" [ "(" INT ")" ] | "E8" [ "(" INT ")" ] | "<" INT ">"
//!       | "gram" "[" rows "]" | "(" expr ")" ;
//! rows := row { ";" row } ;  row := INT { "," INT } ;
//! ```

use std::fmt;

use hmvol_core::lattice::{construct, Constructor, Lattice, MAX_RANK};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

/// Half-open byte range in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// A value with its source location. Equality ignores the location.
#[derive(Debug, Clone)]
pub struct Node<T> {
    pub value: T,
    pub span: Span,
}

impl<T: PartialEq> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    U(Option<BigInt>),
    E8(Option<BigInt>),
    Rank1(BigInt),
    Gram(Vec<Vec<BigInt>>),
    Paren(Box<LatticeExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub multiplier: Option<Node<BigInt>>,
    pub atom: Node<Atom>,
}

/// Orthogonal sum of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeExpr {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("invalid {what} at bytes {}..{}: {message}", span.start, span.end)]
    Semantic {
        what: &'static str,
        span: Span,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Span)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Int(n), Span { start, end: i }));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), Span { start, end: i }));
        } else if b"+*()<>[];,".contains(&c) {
            i += 1;
            out.push((Tok::Sym(c as char), Span { start, end: i }));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ExprError::Syntax {
                offset: start,
                expected: vec!["a token"],
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((Tok::End, Span { start: text.len(), end: text.len() }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

const ATOM_START: [&str; 5] = ["'U'", "'E8'", "'<'", "'gram'", "'('"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 { 0 } else { self.toks[self.pos - 1].1.end }
    }

    fn fail<T>(&self, expected: &[&'static str]) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.span().start,
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, label: &'static str) -> Result<(), ExprError> {
        if self.eat(c) { Ok(()) } else { self.fail(&[label]) }
    }

    fn int(&mut self) -> Result<Node<BigInt>, ExprError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let span = self.span();
                self.pos += 1;
                Ok(Node { value: n, span })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn expr(&mut self) -> Result<LatticeExpr, ExprError> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        Ok(LatticeExpr { terms })
    }

    fn term(&mut self) -> Result<Term, ExprError> {
        let multiplier = if matches!(self.peek(), Tok::Int(_)) {
            let m = self.int()?;
            self.expect('*', "'*'")?;
            Some(m)
        } else {
            None
        };
        Ok(Term { multiplier, atom: self.atom()? })
    }

    fn optional_scale(&mut self) -> Result<Option<BigInt>, ExprError> {
        if !self.eat('(') {
            return Ok(None);
        }
        let k = self.int()?;
        self.expect(')', "')'")?;
        Ok(Some(k.value))
    }

    fn atom(&mut self) -> Result<Node<Atom>, ExprError> {
        let start = self.span().start;
        let value = match self.peek().clone() {
            Tok::Ident(s) if s == "U" => {
                self.pos += 1;
                Atom::U(self.optional_scale()?)
            }
            Tok::Ident(s) if s == "E8" => {
                self.pos += 1;
                Atom::E8(self.optional_scale()?)
            }
            Tok::Ident(s) if s == "gram" => {
                self.pos += 1;
                self.expect('[', "'['")?;
                let mut rows = vec![self.row()?];
                while self.eat(';') {
                    rows.push(self.row()?);
                }
                self.expect(']', "']'")?;
                Atom::Gram(rows)
            }
            Tok::Sym('<') => {
                self.pos += 1;
                let k = self.int()?;
                self.expect('>', "'>'")?;
                Atom::Rank1(k.value)
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')', "')'")?;
                Atom::Paren(Box::new(inner))
            }
            _ => return self.fail(&ATOM_START),
        };
        Ok(Node { value, span: Span { start, end: self.prev_end() } })
    }

    fn row(&mut self) -> Result<Vec<BigInt>, ExprError> {
        let mut row = vec![self.int()?.value];
        while self.eat(',') {
            row.push(self.int()?.value);
        }
        Ok(row)
    }
}

/// Parses an expression; byte offsets in errors refer to `text`.
pub fn parse_expr(text: &str) -> Result<LatticeExpr, ExprError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["'+'", "end of input"]);
    }
    Ok(e)
}

/// Canonical text of an expression.
pub fn render(e: &LatticeExpr) -> String {
    e.to_string()
}

impl fmt::Display for LatticeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if let Some(m) = &t.multiplier {
                write!(f, "{}*", m.value)?;
            }
            write!(f, "{}", t.atom.value)?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::U(None) => f.write_str("U"),
            Atom::U(Some(k)) => write!(f, "U({k})"),
            Atom::E8(None) => f.write_str("E8"),
            Atom::E8(Some(k)) => write!(f, "E8({k})"),
            Atom::Rank1(k) => write!(f, "<{k}>"),
            Atom::Gram(rows) => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "gram[{}]", rows.join(";"))
            }
            Atom::Paren(e) => write!(f, "({e})"),
        }
    }
}

fn semantic(what: &'static str, span: Span, err: impl fmt::Display) -> ExprError {
    ExprError::Semantic { what, span, message: err.to_string() }
}

/// Builds the lattice. A hyperbolic plane summand is recorded only for
/// `U`, `U(1)` and `U(-1)` terms.
pub fn evaluate(e: &LatticeExpr) -> Result<Lattice, ExprError> {
    let mut acc: Option<(Lattice, Span)> = None;
    for t in &e.terms {
        let base = evaluate_atom(&t.atom)?;
        let (lat, span) = match &t.multiplier {
            None => (base, t.atom.span),
            Some(m) => {
                let span = Span { start: m.span.start, end: t.atom.span.end };
                let k = m
                    .value
                    .to_usize()
                    .filter(|k| (1..=MAX_RANK).contains(k))
                    .ok_or_else(|| semantic("multiplier", m.span, format!("must lie in 1..={MAX_RANK}")))?;
                let lat = base.repeat(k).map_err(|err| semantic("multiplier", span, err))?;
                (lat.expect("k >= 1"), span)
            }
        };
        acc = Some(match acc {
            None => (lat, span),
            Some((a, s)) => {
                let whole = Span { start: s.start, end: span.end };
                (a.direct_sum(&lat).map_err(|err| semantic("sum", whole, err))?, whole)
            }
        });
    }
    Ok(acc.expect("grammar guarantees one term").0)
}

fn evaluate_atom(atom: &Node<Atom>) -> Result<Lattice, ExprError> {
    let one = BigInt::one();
    let span = atom.span;
    match &atom.value {
        Atom::U(k) => {
            construct(Constructor::Hyperbolic, k.as_ref().unwrap_or(&one)).map_err(|e| semantic("scale", span, e))
        }
        Atom::E8(k) => construct(Constructor::E8, k.as_ref().unwrap_or(&one)).map_err(|e| semantic("scale", span, e)),
        Atom::Rank1(k) => {
            construct(Constructor::Rank1(k.clone()), &one).map_err(|e| semantic("rank-one lattice", span, e))
        }
        Atom::Gram(rows) => {
            construct(Constructor::Gram(rows.clone()), &one).map_err(|e| semantic("gram literal", span, e))
        }
        Atom::Paren(inner) => evaluate(inner),
    }
}

/// Parses and evaluates in one step.
pub fn lattice_from_text(text: &str) -> Result<Lattice, ExprError> {
    evaluate(&parse_expr(text)?)
}
