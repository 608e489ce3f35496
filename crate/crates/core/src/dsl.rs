//! Text DSL for entering operators and polynomials.
//!
//! Grammar (whitespace insignificant):
//! ```text
//! expr    := ('+' | '-')? term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := primary ('^' INT)*
//! primary := INT ('/' INT)? | 'i' | 'z' INT | 'd' INT | '(' expr ')'
//! ```
//! `z3` is multiplication by the third variable, `d3` is ∂/∂z₃ (1-based).
//! Printing emits normal-ordered terms in graded-lexicographic key order and
//! is a left inverse of parsing on canonical forms.

use crate::error::{CoreError, Result};
use crate::fock::FockPoly;
use crate::scalar::{GaussianRational, MultiIndex};
use crate::weyl::WeylOp;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Imag,
    Z(usize),
    D(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn err(pos: usize, message: impl Into<String>) -> CoreError {
    CoreError::Parse {
        pos,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                toks.push((Tok::Plus, pos));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, pos));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, pos));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, pos));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, pos));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                i += 1;
            }
            'i' => {
                toks.push((Tok::Imag, pos));
                i += 1;
            }
            'z' | 'd' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return Err(err(pos, format!("expected variable index after '{c}'")));
                }
                let digits: String = chars[digits_start..i].iter().map(|&(_, d)| d).collect();
                let idx: usize = digits
                    .parse()
                    .map_err(|_| err(pos, format!("variable index '{digits}' too large")))?;
                if idx == 0 {
                    return Err(err(pos, "variable indices are 1-based"));
                }
                toks.push((if chars[start].1 == 'z' { Tok::Z(idx) } else { Tok::D(idx) }, pos));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, d)| d).collect();
                toks.push((Tok::Num(digits.parse().expect("digits parse to BigInt")), pos));
            }
            other => return Err(err(pos, format!("unexpected character '{other}'"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<WeylOp> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => {
                self.next();
            }
            Some(Tok::Minus) => {
                negate = true;
                self.next();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(&-GaussianRational::one());
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<WeylOp> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.next();
            let f = self.factor()?;
            acc = acc.multiply(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<WeylOp> {
        let mut base = self.primary()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            let pos = self.here();
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e = n
                        .to_u32()
                        .ok_or_else(|| err(pos, "exponent too large"))?;
                    base = base.pow(e);
                }
                _ => return Err(err(pos, "expected integer exponent after '^'")),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<WeylOp> {
        let pos = self.here();
        match self.next() {
            Some(Tok::Num(n)) => {
                let mut value = BigRational::from_integer(n);
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.next();
                    let dpos = self.here();
                    match self.next() {
                        Some(Tok::Num(d)) => {
                            if d.is_zero() {
                                return Err(err(dpos, "zero denominator"));
                            }
                            value /= BigRational::from_integer(d);
                        }
                        _ => return Err(err(dpos, "expected denominator after '/'")),
                    }
                }
                Ok(WeylOp::scalar(self.dim, GaussianRational::from_rational(value)))
            }
            Some(Tok::Imag) => Ok(WeylOp::scalar(self.dim, GaussianRational::i())),
            Some(Tok::Z(idx)) => {
                self.check_index(idx, pos)?;
                Ok(WeylOp::z(self.dim, idx - 1))
            }
            Some(Tok::D(idx)) => {
                self.check_index(idx, pos)?;
                Ok(WeylOp::d(self.dim, idx - 1))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let cpos = self.here();
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(cpos, "expected ')'")),
                }
            }
            Some(other) => Err(err(pos, format!("unexpected token {other:?}"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }

    fn check_index(&self, idx: usize, pos: usize) -> Result<()> {
        if idx > self.dim {
            Err(err(
                pos,
                format!("variable index {idx} exceeds dimension {}", self.dim),
            ))
        } else {
            Ok(())
        }
    }
}

pub(crate) fn parse_weyl_op(text: &str, dim: usize) -> Result<WeylOp> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        dim,
        end: text.len(),
    };
    let op = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(err(parser.here(), "trailing input after expression"));
    }
    Ok(op)
}

pub(crate) fn parse_fock_poly(text: &str, dim: usize) -> Result<FockPoly> {
    let toks = lex(text)?;
    if let Some(&(_, pos)) = toks.iter().find(|(t, _)| matches!(t, Tok::D(_))) {
        return Err(err(pos, "derivative operators are not allowed in a polynomial"));
    }
    parse_weyl_op(text, dim)?.into_polynomial()
}

/// Largest variable index (1-based) mentioned in the text; 0 if none.
pub(crate) fn max_variable_index(text: &str) -> Result<usize> {
    Ok(lex(text)?
        .iter()
        .filter_map(|(t, _)| match t {
            Tok::Z(i) | Tok::D(i) => Some(*i),
            _ => None,
        })
        .max()
        .unwrap_or(0))
}

/// `z1^2*z2`-style rendering of a multiindex; empty string for exponent zero.
pub(crate) fn monomial_string(alpha: &MultiIndex, letter: char) -> String {
    let mut parts = Vec::new();
    for (j, &e) in alpha.entries().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("{letter}{}", j + 1)),
            _ => parts.push(format!("{letter}{}^{e}", j + 1)),
        }
    }
    parts.join("*")
}

pub(crate) fn weyl_monomial_string(alpha: &MultiIndex, beta: &MultiIndex) -> String {
    let z = monomial_string(alpha, 'z');
    let d = monomial_string(beta, 'd');
    match (z.is_empty(), d.is_empty()) {
        (true, true) => String::new(),
        (false, true) => z,
        (true, false) => d,
        (false, false) => format!("{z}*{d}"),
    }
}

/// Renders a sum of (monomial, coefficient) terms so that parsing the result
/// reproduces the operator exactly.
pub(crate) fn format_terms(terms: &[(String, GaussianRational)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (mono, coeff)) in terms.iter().enumerate() {
        let negative = coeff.re().is_negative() || (coeff.re().is_zero() && coeff.im().is_negative());
        let c = if negative { -coeff } else { coeff.clone() };
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mixed = !c.re().is_zero() && !c.im().is_zero();
        let scalar = if mixed {
            format!("({c})")
        } else {
            c.to_string()
        };
        if mono.is_empty() {
            out.push_str(&scalar);
        } else if c == GaussianRational::one() {
            out.push_str(mono);
        } else {
            out.push_str(&scalar);
            out.push('*');
            out.push_str(mono);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_reports_positions() {
        let e = parse_weyl_op("z1 + ?", 1).unwrap_err();
        match e {
            CoreError::Parse { pos, .. } => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_bound_checked() {
        let e = parse_weyl_op("z3", 2).unwrap_err();
        match e {
            CoreError::Parse { pos, message } => {
                assert_eq!(pos, 0);
                assert!(message.contains("exceeds dimension"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn polynomial_rejects_derivatives() {
        let e = parse_fock_poly("z1 + d1", 1).unwrap_err();
        match e {
            CoreError::Parse { pos, .. } => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn max_index_scan() {
        assert_eq!(max_variable_index("d1*z2 + d4").unwrap(), 4);
        assert_eq!(max_variable_index("3/2 - i").unwrap(), 0);
    }
}
