//! Parser for rational functions of `x` with exact coefficients in a
//! multiquadratic field. Accepts `+ - * / ^`, parentheses, implicit
//! multiplication (`8x(x^2-2)`), `sqrt(r)` of a rational, `i`, and decimals.
//! Decimals are stored as exact rationals and mark the result approximate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::field::{Field, Mq};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, Debug, PartialEq)]
pub struct Fraction {
    pub num: Poly<Mq>,
    pub den: Poly<Mq>,
}

impl Fraction {
    pub fn poly(p: Poly<Mq>) -> Self {
        Fraction { num: p, den: Poly::one() }
    }

    fn constant(c: Mq) -> Self {
        Fraction::poly(Poly::constant(c))
    }

    fn reduce(num: Poly<Mq>, den: Poly<Mq>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Fraction::poly(Poly::zero()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.divrem(&g).0, den.divrem(&g).0)
        } else {
            (num, den)
        };
        let lead = den.leading()?.inv()?;
        Some(Fraction { num: num.scale(&lead), den: den.scale(&lead) })
    }

    fn add(&self, o: &Self) -> Self {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Fraction::reduce(num, self.den.mul(&o.den)).expect("nonzero denominators")
    }

    fn neg(&self) -> Self {
        Fraction { num: self.num.neg(), den: self.den.clone() }
    }

    fn mul(&self, o: &Self) -> Self {
        Fraction::reduce(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    fn div(&self, o: &Self) -> Option<Self> {
        if o.num.is_zero() {
            return None;
        }
        Fraction::reduce(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    fn as_constant(&self) -> Option<Mq> {
        if self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0) {
            let n = self.num.coeffs().first().cloned().unwrap_or_else(Mq::zero);
            n.div(&self.den.coeffs()[0])
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    X,
    I,
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            let r = parse_decimal(&text).ok_or_else(|| ExprError {
                column: col,
                message: format!("bad number {text:?}"),
            })?;
            out.push((Tok::Num(r, text.contains('.')), col));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_alphanumeric() {
                k += 1;
            }
            let word: String = chars[start..k].iter().collect();
            // `2x`, `xi` and friends split into single letters except `sqrt`
            match word.as_str() {
                "sqrt" => out.push((Tok::Sqrt, col)),
                _ => {
                    for (j, ch) in word.chars().enumerate() {
                        let tok = match ch {
                            'x' => Tok::X,
                            'i' => Tok::I,
                            _ => {
                                return Err(ExprError {
                                    column: col + j,
                                    message: format!("unknown symbol {word:?}"),
                                })
                            }
                        };
                        out.push((tok, col + j));
                    }
                }
            }
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ExprError { column: col, message: format!("unexpected character {c:?}") });
            }
        };
        out.push((tok, col));
        k += 1;
    }
    Ok(out)
}

/// `"12.375"` as the exact rational 12375/1000.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, d))
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    approximate: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { column: self.column(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Fraction, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Fraction, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.column();
                    let d = self.unary()?;
                    acc = acc
                        .div(&d)
                        .ok_or(ExprError { column: col, message: "division by zero".into() })?;
                }
                Some(Tok::Num(..) | Tok::X | Tok::I | Tok::Sqrt | Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Fraction, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Fraction, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let col = self.column();
        let k = match self.peek() {
            Some(Tok::Num(r, false)) if r.is_integer() => r.to_integer().to_usize(),
            _ => None,
        }
        .filter(|&k| k <= 4096)
        .ok_or(ExprError { column: col, message: "exponent must be a small integer".into() })?;
        self.pos += 1;
        let p = Fraction { num: base.num.pow(k), den: base.den.pow(k) };
        if negative {
            Fraction::poly(Poly::one())
                .div(&p)
                .ok_or(ExprError { column: col, message: "zero to a negative power".into() })
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<Fraction, ExprError> {
        let col = self.column();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        self.pos += 1;
        match tok {
            Tok::Num(r, decimal) => {
                self.approximate |= decimal;
                Ok(Fraction::constant(Mq::rational(r)))
            }
            Tok::X => Ok(Fraction::poly(Poly::x())),
            Tok::I => Ok(Fraction::constant(Mq::i())),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Sqrt => {
                if self.peek() != Some(&Tok::LParen) {
                    return self.err("expected '(' after sqrt");
                }
                self.pos += 1;
                let arg_col = self.column();
                let inner = self.expr()?;
                self.expect_rparen()?;
                let r = inner.as_constant().and_then(|c| c.as_rational()).ok_or(ExprError {
                    column: arg_col,
                    message: "sqrt takes a rational constant".into(),
                })?;
                let root = Mq::sqrt_rational(&r).map_err(|m| ExprError { column: arg_col, message: m })?;
                Ok(Fraction::constant(root))
            }
            _ => Err(ExprError { column: col, message: format!("unexpected token {tok:?}") }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            self.err("expected ')'")
        }
    }
}

/// Parse an expression; returns the reduced fraction and whether any decimal
/// literal occurred.
pub fn parse_fraction(text: &str) -> Result<(Fraction, bool), ExprError> {
    let toks = tokenize(text)?;
    let end = text.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, end, approximate: false };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok((f, p.approximate))
}

/// `[c0, c1, …]` (lowest degree first) or an expression that must be a
/// polynomial.
pub fn parse_polynomial(text: &str) -> Result<(Poly<Mq>, bool), ExprError> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('[') {
        let lead = text.len() - text.trim_start().len() + 1;
        let inner = inner.strip_suffix(']').ok_or(ExprError {
            column: text.trim_end().len(),
            message: "unterminated coefficient list".into(),
        })?;
        let mut coeffs = Vec::new();
        let mut approximate = false;
        let mut offset = lead + 1;
        for part in inner.split(',') {
            let (f, a) = parse_fraction(part).map_err(|e| ExprError { column: e.column + offset - 1, ..e })?;
            let c = f.as_constant().ok_or(ExprError {
                column: offset,
                message: "coefficients must be constants".into(),
            })?;
            approximate |= a;
            coeffs.push(c);
            offset += part.chars().count() + 1;
        }
        return Ok((Poly::new(coeffs), approximate));
    }
    let (f, a) = parse_fraction(text)?;
    if f.den.degree() != Some(0) {
        return Err(ExprError { column: 1, message: "expected a polynomial".into() });
    }
    let scale = f.den.coeffs()[0].inv().expect("monic denominator");
    Ok((f.num.scale(&scale), a))
}
