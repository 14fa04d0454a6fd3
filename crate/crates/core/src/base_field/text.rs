//! Text syntax for polynomials and field elements.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' integer)?
//! atom   := integer | symbol | '(' expr ')'
//! ```
//!
//! Which symbols are meaningful depends on the target: `T` for the polynomial
//! variable, `g` for the generator of `F_q` over `F_p`, `t` for `τ`.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Sym(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, String)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s
                .parse::<u64>()
                .map_err(|_| Error::parse(&s, "integer literal out of range"))?;
            out.push((Tok::Int(n), s));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Sym(s.clone()), s));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), c.to_string()));
            i += 1;
        } else {
            return Err(Error::parse(c.to_string(), "unexpected character"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, String)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn text(&self) -> String {
        self.toks
            .get(self.pos)
            .map(|t| t.1.clone())
            .unwrap_or_else(|| "<end of input>".to_string())
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
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
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    Ok(Expr::Pow(Box::new(base), n))
                }
                _ => Err(Error::parse(self.text(), "exponent must be a non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Sym(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::parse(self.text(), "expected `)`"));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            _ => Err(Error::parse(self.text(), "expected a number, symbol or `(`")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::parse("<empty>", "empty expression"));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(p.text(), "unexpected trailing input"));
    }
    Ok(e)
}

/// An algebra an [`Expr`] can be evaluated into.
pub trait ExprTarget {
    type Value: Clone;

    fn int(&self, n: u64) -> Result<Self::Value>;
    fn sym(&self, name: &str) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn one(&self) -> Result<Self::Value> {
        self.int(1)
    }

    fn eval(&self, e: &Expr) -> Result<Self::Value> {
        match e {
            Expr::Int(n) => self.int(*n),
            Expr::Sym(s) => self.sym(s),
            Expr::Neg(a) => self.neg(&self.eval(a)?),
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?),
            Expr::Sub(a, b) => {
                let nb = self.neg(&self.eval(b)?)?;
                self.add(&self.eval(a)?, &nb)
            }
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Div(a, b) => self.div(&self.eval(a)?, &self.eval(b)?),
            Expr::Pow(a, n) => {
                let base = self.eval(a)?;
                let mut acc = self.one()?;
                let (mut b, mut n) = (base, *n);
                while n > 0 {
                    if n & 1 == 1 {
                        acc = self.mul(&acc, &b)?;
                    }
                    n >>= 1;
                    if n > 0 {
                        b = self.mul(&b, &b)?;
                    }
                }
                Ok(acc)
            }
        }
    }

    fn parse(&self, src: &str) -> Result<Self::Value> {
        self.eval(&parse_expr(src)?)
    }
}

pub(crate) fn unknown_symbol<T>(name: &str) -> Result<T> {
    Err(Error::parse(name, "unknown symbol"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_precedence() {
        let e = parse_expr("T^3+2*T+1").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Add(
                    Box::new(Expr::Pow(Box::new(Expr::Sym("T".into())), 3)),
                    Box::new(Expr::Mul(Box::new(Expr::Int(2)), Box::new(Expr::Sym("T".into()))))
                )),
                Box::new(Expr::Int(1))
            )
        );
    }

    #[test]
    fn reports_offending_token() {
        match parse_expr("T + $") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "$"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_expr("T^x") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "x"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("(T+1").is_err());
        assert!(parse_expr("").is_err());
    }
}
