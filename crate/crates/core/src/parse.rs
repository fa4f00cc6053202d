//! Plain-text grammar for rational functions and Laurent series:
//! integers, `/`, `+`, `-`, `*`, `^`, parentheses, the symbols `t` and
//! `eps`, and (for series) a trailing `O(t^k)` error term.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::{Point, Poly, RatFunc};
use crate::ring::{BaseRing, Rational};
use crate::series::LaurentSeries;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    T,
    Eps,
    BigO,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '0'..='9' => {
                let st = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((st, Tok::Int(s[st..i].parse().expect("digits"))));
            }
            'a'..='z' | 'A'..='Z' => {
                let st = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let tok = match &s[st..i] {
                    "t" => Tok::T,
                    "eps" => Tok::Eps,
                    "O" => Tok::BigO,
                    w => return perr(st, format!("unknown symbol `{w}`")),
                };
                out.push((st, tok));
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => return perr(i, format!("unexpected character `{c}`")),
                };
                out.push((i, tok));
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    base: BaseRing,
    allow_big_o: bool,
    big_o: Option<i64>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.1.clone());
        self.i += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => perr(pos, format!("expected {want:?}, found {t:?}")),
            None => perr(pos, format!("expected {want:?}, found end of input")),
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.signed_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_term(&mut self) -> Result<RatFunc> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            Ok(self.term()?.neg())
        } else {
            self.term()
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        if self.peek() == Some(&Tok::BigO) {
            return self.big_o_term();
        }
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let f = self.power()?;
                    acc = acc.mul(&f);
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.bump();
                    let f = self.power()?;
                    acc = acc.div(&f).or_else(|_| perr(pos, "division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn big_o_term(&mut self) -> Result<RatFunc> {
        let pos = self.pos();
        if !self.allow_big_o {
            return perr(pos, "error term O(...) is only allowed in series");
        }
        self.bump();
        self.expect(Tok::LParen)?;
        self.expect(Tok::T)?;
        let k = if self.peek() == Some(&Tok::Caret) {
            self.bump();
            self.signed_int()?
        } else {
            1
        };
        self.expect(Tok::RParen)?;
        self.big_o = Some(self.big_o.map_or(k, |p| p.min(k)));
        Ok(RatFunc::from_poly(Poly::zero(self.base)))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let pos = self.pos();
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Int(n)) => {
                let v: i64 = i64::try_from(n).or_else(|_| perr(pos, "exponent too large"))?;
                Ok(if neg { -v } else { v })
            }
            Some(t) => perr(pos, format!("expected an integer exponent, found {t:?}")),
            None => perr(pos, "expected an integer exponent, found end of input"),
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let a = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.pos();
            let e = self.signed_int()?;
            return a.pow(e).or_else(|_| perr(pos, "negative power of zero"));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let pos = self.pos();
        let b = self.base;
        match self.bump() {
            Some(Tok::Int(n)) => Ok(RatFunc::constant(b.constant(Rational::from_integer(n)))),
            Some(Tok::T) => Ok(RatFunc::from_poly(Poly::x(b))),
            Some(Tok::Eps) => match b.eps() {
                Ok(e) => Ok(RatFunc::constant(e)),
                Err(_) => perr(pos, "`eps` is not available over Q"),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Minus) => Ok(self.power()?.neg()),
            Some(t) => perr(pos, format!("unexpected token {t:?}")),
            None => perr(pos, "unexpected end of input"),
        }
    }
}

fn run(s: &str, base: BaseRing, allow_big_o: bool) -> Result<(RatFunc, Option<i64>)> {
    let toks = lex(s)?;
    let mut p = Parser { toks, i: 0, end: s.len(), base, allow_big_o, big_o: None };
    if p.peek().is_none() {
        return perr(0, "empty expression");
    }
    let r = p.expr()?;
    if p.i < p.toks.len() {
        return perr(p.pos(), "trailing input");
    }
    Ok((r, p.big_o))
}

pub fn parse_ratfunc(s: &str, base: BaseRing) -> Result<RatFunc> {
    Ok(run(s, base, false)?.0)
}

/// Parses a Laurent series. Without an `O(t^k)` term the input must be a
/// Laurent polynomial; with one, any rational function is expanded at 0.
pub fn parse_series(s: &str, base: BaseRing) -> Result<LaurentSeries> {
    let (r, big_o) = run(s, base, true)?;
    if let Some(p) = big_o {
        return Ok(r.expand_at(&Point::Finite(Rational::from_integer(0.into())), p)?.truncate(p));
    }
    let den = r.den();
    let d = den.degree().unwrap_or(0);
    if den.coeffs()[..d].iter().any(|c| !c.is_zero()) {
        return perr(0, "not a Laurent polynomial; add an O(t^k) term to expand it");
    }
    let lead = den.coeff(d).inverse()?;
    Ok(r.num().to_series().scale(&lead).shift(-(d as i64)))
}
