//! Small arithmetic expression language shared by operator, coefficient and
//! modular-expression inputs: numbers, symbols, `+ - * / ^`, parentheses and
//! implicit multiplication.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_algebra::rational::{BigQ, parse_rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigQ),
    Sym(String, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigQ),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let end = chars.get(i).map_or(src.len(), |(o, _)| *o);
            let text = &src[off..end];
            let v = parse_rational(text).ok_or(Error::Parse { offset: off, message: format!("bad number '{text}'") })?;
            out.push((Tok::Num(v), off));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(src.len(), |(o, _)| *o);
            out.push((Tok::Ident(src[off..end].to_string()), off));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), off));
            i += 1;
        } else if c == '·' || c == '×' {
            out.push((Tok::Op('*'), off));
            i += 1;
        } else if c == '−' {
            out.push((Tok::Op('-'), off));
            i += 1;
        } else {
            return Err(Error::Parse { offset: off, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.offset(), message: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Op('/')) {
                let off = self.offset();
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), off);
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('('))) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let paren = self.eat('(');
            let neg = self.eat('-');
            let e = match self.peek().cloned() {
                Some(Tok::Num(v)) if v.is_integer() => {
                    self.pos += 1;
                    let n: i64 = v.to_integer().try_into().map_err(|_| Error::Parse { offset: self.offset(), message: "exponent too large".into() })?;
                    if neg { -n } else { n }
                }
                _ => return self.err("expected an integer exponent"),
            };
            if paren && !self.eat(')') {
                return self.err("expected ')'");
            }
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s, off))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse { offset: 0, message: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Evaluates an expression tree in any algebra with the needed operations.
pub trait Algebra: Sized + Clone {
    type Ctx;
    fn constant(ctx: &Self::Ctx, c: &BigQ) -> Result<Self>;
    fn symbol(ctx: &Self::Ctx, name: &str, offset: usize) -> Result<Self>;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn div(&self, o: &Self, offset: usize) -> Result<Self>;
    fn neg(&self) -> Result<Self>;
    fn pow(&self, e: i64) -> Result<Self>;
}

pub fn eval<A: Algebra>(e: &Expr, ctx: &A::Ctx) -> Result<A> {
    match e {
        Expr::Num(v) => A::constant(ctx, v),
        Expr::Sym(s, off) => A::symbol(ctx, s, *off),
        Expr::Add(a, b) => eval::<A>(a, ctx)?.add(&eval(b, ctx)?),
        Expr::Sub(a, b) => eval::<A>(a, ctx)?.sub(&eval(b, ctx)?),
        Expr::Mul(a, b) => eval::<A>(a, ctx)?.mul(&eval(b, ctx)?),
        Expr::Div(a, b, off) => eval::<A>(a, ctx)?.div(&eval(b, ctx)?, *off),
        Expr::Neg(a) => eval::<A>(a, ctx)?.neg(),
        Expr::Pow(a, n) => eval::<A>(a, ctx)?.pow(*n),
    }
}

/// Substitutes `{name}` placeholders.
pub fn instantiate(template: &str, params: &[(&str, &BigQ)]) -> String {
    let mut s = template.to_string();
    for (k, v) in params {
        let txt = if v.denom() == &num_bigint::BigInt::from(1) {
            format!("{}", v.numer())
        } else {
            format!("({}/{})", v.numer(), v.denom())
        };
        let txt = if v < &&BigQ::zero() { format!("({txt})") } else { txt };
        s = s.replace(&format!("{{{k}}}"), &txt);
    }
    s
}
