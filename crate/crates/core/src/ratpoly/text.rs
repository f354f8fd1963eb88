//! Text form of polynomials: `3/2*t1^2*t2^-1 - 1`.
//!
//! Terms are printed lex-descending. A coefficient of `1` or `-1` is omitted
//! when the term has at least one variable.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{ExponentVector, Polynomial, Rational, VarList};

pub(super) fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (e, c)) in p.terms().enumerate() {
        let negative = c.is_negative();
        match (idx, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = c.abs();
        let mut factors: Vec<String> = Vec::new();
        for (k, &ek) in e.as_slice().iter().enumerate() {
            match ek {
                0 => {}
                1 => factors.push(p.vars()[k].clone()),
                _ => factors.push(format!("{}^{}", p.vars()[k], ek)),
            }
        }
        if factors.is_empty() || !abs.is_one() {
            let _ = write!(out, "{abs}");
            if !factors.is_empty() {
                out.push('*');
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a VarList,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("validated digits"))
    }

    fn ident(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
        match self.vars.iter().position(|v| v == name) {
            Some(k) => Ok(k),
            None => {
                self.pos = start;
                self.err(format!("unknown variable `{name}`"))
            }
        }
    }

    /// factor ('*' factor)*
    fn term(&mut self) -> Result<(ExponentVector, Rational)> {
        let mut exps = vec![0i32; self.vars.len()];
        let mut coef = Rational::one();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let num = self.digits()?;
                    let den = if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let d = self.digits()?;
                        if d.is_zero() {
                            return self.err("zero denominator");
                        }
                        d
                    } else {
                        BigInt::one()
                    };
                    coef *= Rational::new(num, den);
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let k = self.ident()?;
                    let mut e: i64 = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let neg = if self.peek() == Some(b'-') {
                            self.pos += 1;
                            true
                        } else {
                            false
                        };
                        let mag = self.digits()?;
                        let mag: i64 = match i64::try_from(&mag) {
                            Ok(v) if v <= i32::MAX as i64 => v,
                            _ => return self.err("exponent out of range"),
                        };
                        e = if neg { -mag } else { mag };
                    }
                    let total = exps[k] as i64 + e;
                    if total.abs() > i32::MAX as i64 {
                        return self.err("exponent out of range");
                    }
                    exps[k] = total as i32;
                }
                _ => return self.err("expected a coefficient or variable"),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((ExponentVector::new(exps), coef))
    }
}

pub(super) fn parse_polynomial(text: &str, vars: VarList) -> Result<Polynomial> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: &vars,
    };
    let mut terms = Vec::new();
    parser.skip_ws();
    if parser.peek().is_none() {
        return parser.err("empty polynomial");
    }
    let mut sign = Rational::one();
    if parser.peek() == Some(b'-') {
        parser.pos += 1;
        sign = -sign;
    } else if parser.peek() == Some(b'+') {
        parser.pos += 1;
    }
    loop {
        let (e, c) = parser.term()?;
        terms.push((e, c * &sign));
        parser.skip_ws();
        match parser.peek() {
            None => break,
            Some(b'+') => sign = Rational::one(),
            Some(b'-') => sign = -Rational::one(),
            Some(_) => return parser.err("expected `+` or `-`"),
        }
        parser.pos += 1;
    }
    Polynomial::from_terms(vars.clone(), terms, None)
}
