//! Expression grammar shared by operator and polynomial input slots.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' signed-int)?
//! atom   := int ['/' int] | 'x' index | 'u' index | 'tau' | '(' expr ')'
//! ```
//!
//! In operator slots `*` is the star product; in map-spec slots the same
//! text is evaluated commutatively and `tau` is rejected.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use wkb_core::{MultiPoly, Rational, Var, WkbSymbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    Rational(Rational),
    Var(Var),
    Tau,
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Neg(Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(char, usize),
    Tau,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            'x' | 'u' => {
                i += 1;
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits == i {
                    return err(start, format!("expected an index after '{c}'"));
                }
                let index: usize = match text[digits..i].parse() {
                    Ok(k) if k >= 1 => k,
                    _ => return err(digits, "variable indices start at 1"),
                };
                out.push((start, Tok::Var(c, index)));
                continue;
            }
            't' if text[i..].starts_with("tau") => {
                i += 3;
                out.push((start, Tok::Tau));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return err(start, format!("unexpected character '{ch}'"));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    dim: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut acc = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            ExprAst::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = ExprAst::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = ExprAst::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = ExprAst::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let k = match self.bump() {
            Some(Tok::Int(n)) => match i64::try_from(n) {
                Ok(k) if k <= u32::MAX as i64 => k,
                _ => return err(at, "exponent too large"),
            },
            _ => return err(at, "expected an integer exponent"),
        };
        let k = if negative { -k } else { k };
        if k < 0 && base != ExprAst::Tau {
            return err(at, "only tau admits negative exponents");
        }
        Ok(ExprAst::Pow(Box::new(base), k))
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let den_at = self.offset();
                    match self.bump() {
                        Some(Tok::Int(d)) if d.is_zero() => err(den_at, "zero denominator"),
                        Some(Tok::Int(d)) => Ok(ExprAst::Rational(Rational::new(n, d))),
                        _ => err(den_at, "expected a denominator"),
                    }
                } else {
                    Ok(ExprAst::Rational(Rational::from_integer(n)))
                }
            }
            Some(Tok::Var(c, index)) => {
                if index > self.dim {
                    return err(at, format!("index out of range: {c}{index} with dim {}", self.dim));
                }
                let v = if c == 'x' {
                    Var::X(index - 1)
                } else {
                    Var::U(index - 1)
                };
                Ok(ExprAst::Var(v))
            }
            Some(Tok::Tau) => Ok(ExprAst::Tau),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.offset();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => err(close, "expected ')'"),
                }
            }
            Some(_) => err(at, "expected a number, variable, tau or '('"),
            None => err(at, "unexpected end of input"),
        }
    }
}

pub fn parse_expr(text: &str, dim: usize) -> Result<ExprAst, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
        dim,
    };
    let ast = p.expr()?;
    if p.pos < toks.len() {
        return err(p.offset(), "unexpected trailing input");
    }
    Ok(ast)
}

impl ExprAst {
    /// Upper bound on how far star products can raise the floor.
    fn positive_order(&self) -> i64 {
        match self {
            ExprAst::Rational(_) | ExprAst::Var(_) => 0,
            ExprAst::Tau => 1,
            ExprAst::Neg(a) => a.positive_order(),
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) => a.positive_order().max(b.positive_order()),
            ExprAst::Mul(a, b) => a.positive_order() + b.positive_order(),
            ExprAst::Pow(a, k) => a.positive_order() * (*k).max(0),
        }
    }

    /// Star-product evaluation, exact on the window `floor`.
    pub fn to_symbol(&self, dim: usize, floor: i64) -> WkbSymbol {
        let working = floor - self.positive_order();
        self.lower(dim, working).truncate(floor).with_floor(floor)
    }

    fn lower(&self, dim: usize, floor: i64) -> WkbSymbol {
        let ok = "operands share dimension";
        match self {
            ExprAst::Rational(c) => WkbSymbol::constant(dim, c.clone(), floor),
            ExprAst::Var(v) => WkbSymbol::var(dim, *v, floor),
            ExprAst::Tau => WkbSymbol::tau_power(dim, 1, floor),
            ExprAst::Neg(a) => -&a.lower(dim, floor),
            ExprAst::Add(a, b) => a.lower(dim, floor).try_add(&b.lower(dim, floor)).expect(ok),
            ExprAst::Sub(a, b) => a.lower(dim, floor).try_sub(&b.lower(dim, floor)).expect(ok),
            ExprAst::Mul(a, b) => a.lower(dim, floor).star(&b.lower(dim, floor)).expect(ok),
            ExprAst::Pow(a, k) if **a == ExprAst::Tau => WkbSymbol::tau_power(dim, *k, floor),
            ExprAst::Pow(a, k) => a.lower(dim, floor).star_pow(*k as u32),
        }
    }

    /// Commutative evaluation for polynomial slots.
    pub fn to_poly(&self, dim: usize) -> Result<MultiPoly, String> {
        Ok(match self {
            ExprAst::Rational(c) => MultiPoly::constant(dim, c.clone()),
            ExprAst::Var(v) => MultiPoly::var(dim, *v),
            ExprAst::Tau => return Err("tau is not allowed in a polynomial slot".into()),
            ExprAst::Neg(a) => -&a.to_poly(dim)?,
            ExprAst::Add(a, b) => &a.to_poly(dim)? + &b.to_poly(dim)?,
            ExprAst::Sub(a, b) => &a.to_poly(dim)? - &b.to_poly(dim)?,
            ExprAst::Mul(a, b) => &a.to_poly(dim)? * &b.to_poly(dim)?,
            ExprAst::Pow(a, k) => a.to_poly(dim)?.pow(*k as u32),
        })
    }

    /// The value of a `tau`-free, variable-free expression.
    pub fn to_rational(&self) -> Option<Rational> {
        let p = self.to_poly(0).ok()?;
        Some(p.as_constant().unwrap_or_else(Rational::zero))
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Rational(c) if c.is_integer() => write!(f, "{}", c.numer()),
            ExprAst::Rational(c) => write!(f, "{}/{}", c.numer(), c.denom()),
            ExprAst::Var(v) => write!(f, "{v}"),
            ExprAst::Tau => f.write_str("tau"),
            ExprAst::Add(a, b) => write!(f, "({a} + {b})"),
            ExprAst::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprAst::Neg(a) => write!(f, "(-{a})"),
            ExprAst::Mul(a, b) => write!(f, "{a}*{b}"),
            ExprAst::Pow(a, k) => write!(f, "{a}^{k}"),
        }
    }
}

/// Parses and star-evaluates an operator expression on the window `-depth`.
pub fn parse_symbol(text: &str, dim: usize, depth: u32) -> Result<WkbSymbol, ParseError> {
    Ok(parse_expr(text, dim)?.to_symbol(dim, -(depth as i64)))
}

/// Parses and commutatively evaluates a polynomial expression.
pub fn parse_poly(text: &str, dim: usize) -> Result<MultiPoly, ParseError> {
    parse_expr(text, dim)?.to_poly(dim).map_err(|message| ParseError {
        position: text.find("tau").unwrap_or(0),
        message,
    })
}

/// Parses a rational literal `-?[0-9]+(/[0-9]+)?`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match body.split_once('/') {
        Some((n, d)) if digits(n) && digits(d) => (n, d),
        None if digits(body) => (body, "1"),
        _ => return Err(format!("malformed rational '{text}'")),
    };
    let num: BigInt = num.parse().expect("digits");
    let den: BigInt = den.parse().expect("digits");
    if den.is_zero() {
        return Err(format!("zero denominator in '{text}'"));
    }
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}
