//! Text grammar for operators: a signed sum of terms `c*d^k`, `c*x^j` and constants.
//!
//! `d^3 + 2*d - x^2 - 1` is `∂³ + 2∂ − (x² + 1)`. Coefficients are integers or `p/q`;
//! the `c*` prefix and `^1` exponent are optional.

use airy_formal::operator::{validate, AiryOperator};
use airy_formal::{AiryError, Rational};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorTextError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] AiryError),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos, msg: msg.into() })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| self.err(start, format!("integer `{text}` is too large")))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let num = self.integer()?;
        if self.eat(b'/') {
            let at = self.pos;
            let den = self.integer()?;
            if den == 0 {
                return self.err(at, "zero denominator");
            }
            return Ok(Rational::new(num, den));
        }
        Ok(Rational::int(num))
    }

    fn exponent(&mut self) -> Result<usize, ParseError> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let at = self.pos;
        let e = self.integer()?;
        usize::try_from(e).or_else(|_| self.err(at, "exponent out of range"))
    }
}

/// Coefficients keyed by power.
pub type Terms = BTreeMap<usize, Rational>;

/// Parses operator text into `(a, b)` maps: `a[i]` multiplies `∂^i`, `b[j]` multiplies
/// `−x^j`. A term `c*d^0` counts as a constant.
pub fn parse_terms(text: &str) -> Result<(Terms, Terms), ParseError> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
    let mut a = Terms::new();
    let mut b = Terms::new();
    let mut first = true;
    loop {
        let Some(c) = lx.peek() else {
            if first {
                return lx.err(0, "empty operator");
            }
            break;
        };
        let mut sign = Rational::ONE;
        if c == b'+' || c == b'-' {
            if c == b'-' {
                sign = -sign;
            }
            lx.pos += 1;
        } else if !first {
            return lx.err(lx.pos, format!("expected `+` or `-`, found `{}`", c as char));
        }
        first = false;
        let at = lx.pos;
        let coef = match lx.peek() {
            Some(ch) if ch.is_ascii_digit() => {
                let r = lx.rational()?;
                match lx.peek() {
                    Some(b'*') => {
                        lx.pos += 1;
                        Some(r)
                    }
                    _ => {
                        *b.entry(0).or_insert(Rational::ZERO) -= sign * r;
                        continue;
                    }
                }
            }
            _ => None,
        };
        let c = sign * coef.unwrap_or(Rational::ONE);
        let var_at = {
            lx.skip_ws();
            lx.pos
        };
        match lx.peek() {
            Some(b'd') => {
                lx.pos += 1;
                let k = lx.exponent()?;
                if k == 0 {
                    *b.entry(0).or_insert(Rational::ZERO) -= c;
                } else {
                    *a.entry(k).or_insert(Rational::ZERO) += c;
                }
            }
            Some(b'x') => {
                lx.pos += 1;
                let j = lx.exponent()?;
                *b.entry(j).or_insert(Rational::ZERO) -= c;
            }
            Some(ch) => return lx.err(var_at, format!("expected `d`, `x` or a coefficient, found `{}`", ch as char)),
            None => return lx.err(at.max(var_at), "unexpected end of input"),
        }
    }
    a.retain(|_, v| !v.is_zero());
    b.retain(|_, v| !v.is_zero());
    Ok((a, b))
}

/// Parses and validates an operator.
pub fn parse_operator(text: &str) -> Result<AiryOperator, OperatorTextError> {
    let (a, b) = parse_terms(text)?;
    let n = a.keys().next_back().copied().unwrap_or(0);
    let m = b.keys().next_back().copied().unwrap_or(0);
    if n == 0 {
        return Err(ParseError { pos: 0, msg: "operator has no derivative term".into() }.into());
    }
    let a_vec = (1..=n).map(|i| a.get(&i).copied().unwrap_or(Rational::ZERO)).collect();
    let b_vec = (0..=m).map(|j| b.get(&j).copied().unwrap_or(Rational::ZERO)).collect();
    Ok(validate(n as i64, m as i64, a_vec, b_vec)?)
}
