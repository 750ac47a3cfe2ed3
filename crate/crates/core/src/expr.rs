//! Parser for exact scalar and polynomial expressions.
//!
//! Accepts integers, decimals, `+ - * / ^`, parentheses, implicit
//! multiplication (`2xz`), and `sqrt(q)` of rational constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::TernaryPoly;
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character '{0}' at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token at offset {0}")]
    UnexpectedToken(usize),
    #[error("unknown identifier '{0}'")]
    UnknownIdent(String),
    #[error("division by a non-constant or zero expression")]
    BadDivision,
    #[error("exponent must be a non-negative integer")]
    BadExponent,
    #[error("sqrt needs a rational argument with small prime factors")]
    BadSqrt,
    #[error("expression is not a constant")]
    NotConstant,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut int = String::new();
            let mut frac = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                int.push(chars[i]);
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            if int.is_empty() && frac.is_empty() {
                return Err(ParseError::UnexpectedChar('.', start));
            }
            let digits: BigInt = format!("0{int}{frac}").parse().unwrap();
            let mut q = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                let neg = j < chars.len() && chars[j] == '-';
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                let estart = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j > estart {
                    let e: u32 = chars[estart..j].iter().collect::<String>().parse().map_err(|_| ParseError::BadExponent)?;
                    let p = BigRational::from_integer(BigInt::from(10u32).pow(e));
                    q = if neg { q / p } else { q * p };
                    i = j;
                }
            }
            out.push((start, Tok::Num(q)));
        } else if c.is_alphabetic() {
            let start = i;
            if chars[i..].iter().take(4).collect::<String>().eq_ignore_ascii_case("sqrt") {
                out.push((start, Tok::Ident("sqrt".into())));
                i += 4;
            } else {
                out.push((start, Tok::Ident(c.to_string())));
                i += 1;
            }
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar(c, i));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: [&'a str; 3],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(usize::MAX)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<TernaryPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<TernaryPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(ParseError::BadDivision);
                }
                let inv = d.coeff([0, 0, 0]).inv().ok_or(ParseError::BadDivision)?;
                acc = acc.scale(&inv);
            } else if self.starts_primary() {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<TernaryPoly, ParseError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<TernaryPoly, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let e = match self.toks.get(self.pos) {
                Some((_, Tok::Num(q))) if q.is_integer() && q >= &BigRational::zero() => {
                    q.to_integer().try_into().map_err(|_| ParseError::BadExponent)?
                }
                Some(_) => return Err(ParseError::BadExponent),
                None => return Err(ParseError::UnexpectedEnd),
            };
            self.pos += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<TernaryPoly, ParseError> {
        let off = self.offset();
        match self.toks.get(self.pos).cloned() {
            None => Err(ParseError::UnexpectedEnd),
            Some((_, Tok::Num(q))) => {
                self.pos += 1;
                Ok(TernaryPoly::constant(Surd::from_rational(q)))
            }
            Some((_, Tok::Op('('))) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::UnexpectedToken(self.offset()));
                }
                Ok(e)
            }
            Some((_, Tok::Ident(name))) if name == "sqrt" => {
                self.pos += 1;
                if !self.eat('(') {
                    return Err(ParseError::UnexpectedToken(self.offset()));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::UnexpectedToken(self.offset()));
                }
                if !arg.is_constant() {
                    return Err(ParseError::BadSqrt);
                }
                let root = arg.coeff([0, 0, 0]).sqrt().ok_or(ParseError::BadSqrt)?;
                Ok(TernaryPoly::constant(root))
            }
            Some((_, Tok::Ident(name))) => {
                self.pos += 1;
                let k = self
                    .names
                    .iter()
                    .position(|n| n.eq_ignore_ascii_case(&name))
                    .ok_or(ParseError::UnknownIdent(name))?;
                let mut e = [0; 3];
                e[k] = 1;
                Ok(TernaryPoly::monomial(e, Surd::one()))
            }
            Some(_) => Err(ParseError::UnexpectedToken(off)),
        }
    }
}

/// Parses a polynomial in the given three variable names (case-insensitive).
pub fn parse_poly_in(s: &str, names: [&str; 3]) -> Result<TernaryPoly, ParseError> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, names };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::UnexpectedToken(p.offset()));
    }
    Ok(e)
}

/// Parses a polynomial in x, y, z.
pub fn parse_poly(s: &str) -> Result<TernaryPoly, ParseError> {
    parse_poly_in(s, ["x", "y", "z"])
}

/// Parses a constant expression such as `sqrt(2)/4` or `-0.25`.
pub fn parse_scalar(s: &str) -> Result<Surd, ParseError> {
    let p = parse_poly_in(s, ["", "", ""])?;
    if !p.is_constant() {
        return Err(ParseError::NotConstant);
    }
    Ok(p.coeff([0, 0, 0]))
}

/// Parses a comma-separated triple of constants.
pub fn parse_triple(s: &str) -> Result<[Surd; 3], ParseError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(ParseError::UnexpectedEnd);
    }
    Ok([parse_scalar(parts[0])?, parse_scalar(parts[1])?, parse_scalar(parts[2])?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("-1/2").unwrap(), Surd::from_frac(-1, 2));
        assert_eq!(parse_scalar("0.6").unwrap(), Surd::from_frac(3, 5));
        assert_eq!(parse_scalar("2.5e-1").unwrap(), Surd::from_frac(1, 4));
        let r = parse_scalar("sqrt(2)/4").unwrap();
        assert_eq!(&r * &r, Surd::from_frac(1, 8));
        assert_eq!(parse_scalar("sqrt(-1)*sqrt(-1)").unwrap(), Surd::from_int(-1));
        assert_eq!(parse_scalar("sqrt(8)").unwrap().to_string(), "2*sqrt(2)");
        assert!(parse_scalar("x").is_err());
        assert_eq!(parse_scalar("1/0"), Err(ParseError::BadDivision));
    }

    #[test]
    fn polynomials() {
        let a = parse_poly("2xz + y^2").unwrap();
        let b = parse_poly("2*x*z+y*y").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("-x^2").unwrap().coeff([2, 0, 0]), Surd::from_int(-1));
        let c = parse_poly("(X+sqrt(2)/2*Z)^2").unwrap();
        assert_eq!(c.coeff([0, 0, 2]), Surd::from_frac(1, 2));
        assert!(matches!(parse_poly("x +* y"), Err(ParseError::UnexpectedToken(_))));
        assert!(matches!(parse_poly("w"), Err(ParseError::UnknownIdent(_))));
    }

    #[test]
    fn custom_names() {
        let d = parse_poly_in("n*(l*m - n^2)", ["l", "m", "n"]).unwrap();
        assert_eq!(d.coeff([1, 1, 1]), Surd::from_int(1));
        assert_eq!(d.coeff([0, 0, 3]), Surd::from_int(-1));
    }
}
