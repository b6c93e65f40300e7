//! A small arithmetic-expression parser shared by the rational-function,
//! form and field-spec readers.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/')? unary)*      juxtaposition multiplies
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := integer | letter | '(' expr ')'
//! ```
//!
//! Variables are single letters. The parser builds a syntax tree; callers
//! fold it into their own algebra with [`Algebra`].

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(u128),
    Var(char),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

/// Target of [`Expr::fold`].
pub trait Algebra {
    type V: Clone;

    fn int(&self, n: u128) -> Result<Self::V>;
    fn var(&self, name: char) -> Result<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn div(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn neg(&self, a: &Self::V) -> Result<Self::V>;
    fn pow(&self, a: &Self::V, e: i64) -> Result<Self::V>;
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected {:?} in {src:?}",
                p.tokens[p.pos]
            )));
        }
        Ok(e)
    }

    pub fn fold<A: Algebra>(&self, alg: &A) -> Result<A::V> {
        Ok(match self {
            Expr::Int(n) => alg.int(*n)?,
            Expr::Var(c) => alg.var(*c)?,
            Expr::Neg(a) => alg.neg(&a.fold(alg)?)?,
            Expr::Add(a, b) => alg.add(&a.fold(alg)?, &b.fold(alg)?)?,
            Expr::Sub(a, b) => alg.sub(&a.fold(alg)?, &b.fold(alg)?)?,
            Expr::Mul(a, b) => alg.mul(&a.fold(alg)?, &b.fold(alg)?)?,
            Expr::Div(a, b) => alg.div(&a.fold(alg)?, &b.fold(alg)?)?,
            Expr::Pow(a, e) => alg.pow(&a.fold(alg)?, *e)?,
        })
    }

    /// Letters occurring in the expression, sorted and deduplicated.
    pub fn variables(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<char>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(c) => out.push(*c),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u128),
    Var(char),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut n: u128 = 0;
            while let Some(&d) = chars.peek() {
                let Some(v) = d.to_digit(10) else { break };
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(v as u128))
                    .ok_or_else(|| Error::Parse(format!("integer literal too large in {src:?}")))?;
                chars.next();
            }
            out.push(Tok::Int(n));
        } else if c.is_ascii_alphabetic() {
            chars.next();
            if chars.peek().is_some_and(|d| d.is_ascii_alphanumeric()) {
                return Err(Error::Parse(format!(
                    "variables are single letters; found a longer name in {src:?}"
                )));
            }
            out.push(Tok::Var(c));
        } else if "+-*/^()".contains(c) {
            chars.next();
            out.push(Tok::Op(c));
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
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
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Int(_) | Tok::Var(_) | Tok::Op('('))) {
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
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek() {
            Some(&Tok::Int(n)) => {
                self.pos += 1;
                let e = i64::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))?;
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            other => Err(Error::Parse(format!(
                "exponent must be an integer literal, found {other:?}"
            ))),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Var(c)) => {
                self.pos += 1;
                Ok(Expr::Var(c))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("expected an operand, found {other:?}"))),
        }
    }
}

/// Parses a field spec such as `p=7` or `p=2,k=3` (also `p=2, k=3`).
pub fn parse_field_spec(src: &str) -> Result<(u64, u32)> {
    let mut p = None;
    let mut k = 1u32;
    for part in src.split(',') {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("field spec {src:?}: expected key=value")))?;
        let val = val.trim();
        match key.trim() {
            "p" => {
                p = Some(val.parse::<u64>().map_err(|_| {
                    Error::Parse(format!("field spec {src:?}: bad prime {val:?}"))
                })?)
            }
            "k" => {
                k = val.parse::<u32>().map_err(|_| {
                    Error::Parse(format!("field spec {src:?}: bad degree {val:?}"))
                })?
            }
            other => {
                return Err(Error::Parse(format!("field spec {src:?}: unknown key {other:?}")))
            }
        }
    }
    let p = p.ok_or_else(|| Error::Parse(format!("field spec {src:?}: missing p")))?;
    Ok((p, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Evaluates over the integers so the tree shape can be checked.
    struct Z(i128);

    impl Algebra for Z {
        type V = i128;
        fn int(&self, n: u128) -> Result<i128> {
            Ok(n as i128)
        }
        fn var(&self, _: char) -> Result<i128> {
            Ok(self.0)
        }
        fn add(&self, a: &i128, b: &i128) -> Result<i128> {
            Ok(a + b)
        }
        fn sub(&self, a: &i128, b: &i128) -> Result<i128> {
            Ok(a - b)
        }
        fn mul(&self, a: &i128, b: &i128) -> Result<i128> {
            Ok(a * b)
        }
        fn div(&self, a: &i128, b: &i128) -> Result<i128> {
            Ok(a / b)
        }
        fn neg(&self, a: &i128) -> Result<i128> {
            Ok(-a)
        }
        fn pow(&self, a: &i128, e: i64) -> Result<i128> {
            Ok(a.pow(e as u32))
        }
    }

    fn ev(s: &str, t: i128) -> i128 {
        Expr::parse(s).unwrap().fold(&Z(t)).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1 + 2*3", 0), 7);
        assert_eq!(ev("2*t^3 + 1", 2), 17);
        assert_eq!(ev("-t^2", 3), -9);
        assert_eq!(ev("(t+1)^2 - t", 4), 21);
        assert_eq!(ev("12/2/3", 0), 2);
        assert_eq!(ev("3t(t+1)", 2), 18);
        assert_eq!(ev("2 3", 0), 6);
    }

    #[test]
    fn errors() {
        for bad in ["", "t +", "(t", "t^x", "tt", "t $ 1", "t)"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn negative_exponent_kept() {
        assert_eq!(
            Expr::parse("t^-2").unwrap(),
            Expr::Pow(Box::new(Expr::Var('t')), -2)
        );
    }

    #[test]
    fn variables_listed() {
        assert_eq!(Expr::parse("x*z + y^2 - x").unwrap().variables(), vec!['x', 'y', 'z']);
    }

    #[test]
    fn field_specs() {
        assert_eq!(parse_field_spec("p=7").unwrap(), (7, 1));
        assert_eq!(parse_field_spec("p=2,k=3").unwrap(), (2, 3));
        assert_eq!(parse_field_spec(" p = 3 , k = 2 ").unwrap(), (3, 2));
        assert!(parse_field_spec("q=7").is_err());
        assert!(parse_field_spec("k=2").is_err());
    }
}
