//! Text syntax: `z^3 + w^3 - 3*z*w`, integer or `p/q` coefficients,
//! parentheses, and implicit multiplication (`3z`).

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::Polynomial;
use super::{KernelError, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, KernelError> {
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
            out.push((start, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(KernelError::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

/// Identifiers in order of first appearance.
pub fn identifiers(src: &str) -> Result<Vec<String>, KernelError> {
    let mut names: Vec<String> = Vec::new();
    for (_, t) in lex(src)? {
        if let Tok::Ident(s) = t {
            if !names.contains(&s) {
                names.push(s);
            }
        }
    }
    Ok(names)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a Arc<[String]>,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, KernelError> {
        Err(KernelError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Polynomial, KernelError> {
        let mut acc = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, KernelError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return self.err("division only by a nonzero constant");
                    }
                    acc = acc.scale(&d.constant_term().recip());
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    acc = acc * self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial, KernelError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| KernelError::Parse { pos: self.offset(), msg: "exponent too large".into() })?;
                    Ok(base.pow(e))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, KernelError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.vars, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                let i = match self.vars.iter().position(|v| *v == name) {
                    Some(i) => i,
                    None => return self.err(format!("unknown variable '{name}'")),
                };
                self.pos += 1;
                Ok(Polynomial::var(self.vars, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_polynomial(src: &str, vars: &Arc<[String]>) -> Result<Polynomial, KernelError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(KernelError::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, vars, len: src.len() };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parses a rational literal such as `-3/4`, `2` or `0.125`.
pub fn parse_rational(src: &str) -> Result<Rational, KernelError> {
    let s = src.trim();
    let bad = || KernelError::Parse { pos: 0, msg: format!("not a rational number: '{src}'") };
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| bad())?;
        let d: BigInt = b.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ipart: BigInt = if ip.is_empty() || ip == "-" || ip == "+" { BigInt::zero() } else { ip.parse().map_err(|_| bad())? };
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let fnum: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let frac = Rational::new(fnum, scale);
        let whole = Rational::from_integer(ipart);
        return Ok(if neg { whole - frac } else { whole + frac });
    }
    s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::poly::var_list;

    #[test]
    fn parses_spec_syntax() {
        let v = var_list(&["z", "w"]);
        let f = parse_polynomial("z^3 + w^3 - 3*z*w", &v).unwrap();
        assert_eq!(f.to_string(), "z^3 + w^3 - 3*z*w");
        let g = parse_polynomial("1/2*z - (w - z)^2", &v).unwrap();
        assert_eq!(g.to_string(), "-z^2 + 2*z*w - w^2 + 1/2*z");
        assert_eq!(parse_polynomial("3z^2", &v).unwrap().to_string(), "3*z^2");
    }

    #[test]
    fn rejects_bad_input() {
        let v = var_list(&["z"]);
        assert!(parse_polynomial("z +", &v).is_err());
        assert!(parse_polynomial("q", &v).is_err());
        assert!(parse_polynomial("z/z", &v).is_err());
        assert!(parse_polynomial("", &v).is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/4").unwrap(), Rational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("0.125").unwrap(), Rational::new(1.into(), 8.into()));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new((-1).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
    }
}
