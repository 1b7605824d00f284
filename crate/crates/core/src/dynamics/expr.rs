//! Parser for map expressions such as `(x^2-2)/x^2` or `3x^2 + x - 1`.
//!
//! Integer coefficients, the variable `x`, `+ - * / ^` and parentheses.
//! Exponents are non-negative integer literals. A `/` may appear at most once
//! and only outside parentheses. Juxtaposition (`2x`, `x(x+1)`) multiplies.

use super::intpoly::{self, IntPoly};
use super::MapError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, MapError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut depth = 0i32;
    let mut slashes = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v = src[start..i].parse().map_err(|_| MapError::Parse {
                    pos: start,
                    msg: "integer literal out of range".into(),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            b'x' | b'X' => Tok::X,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => {
                if depth != 0 {
                    return Err(MapError::Parse {
                        pos: i,
                        msg: "division is only allowed at top level".into(),
                    });
                }
                slashes += 1;
                if slashes > 1 {
                    return Err(MapError::Parse {
                        pos: i,
                        msg: "at most one division is allowed".into(),
                    });
                }
                Tok::Slash
            }
            b'^' => Tok::Caret,
            b'(' => {
                depth += 1;
                Tok::LParen
            }
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(MapError::Parse {
                        pos: i,
                        msg: "unbalanced ')'".into(),
                    });
                }
                Tok::RParen
            }
            _ => {
                return Err(MapError::Parse {
                    pos: i,
                    msg: format!("unexpected character '{}'", c as char),
                })
            }
        };
        out.push((tok, i));
        i += 1;
    }
    if depth != 0 {
        return Err(MapError::Parse {
            pos: src.len(),
            msg: "unbalanced '('".into(),
        });
    }
    Ok(out)
}

/// A rational function `num/den` over the integers.
#[derive(Clone, Debug)]
struct Frac {
    num: IntPoly,
    den: IntPoly,
}

impl Frac {
    fn poly(p: IntPoly) -> Self {
        Frac {
            num: p,
            den: intpoly::constant(1),
        }
    }
    fn add(&self, o: &Frac) -> Frac {
        Frac {
            num: intpoly::add(&intpoly::mul(&self.num, &o.den), &intpoly::mul(&o.num, &self.den)),
            den: intpoly::mul(&self.den, &o.den),
        }
    }
    fn neg(&self) -> Frac {
        Frac {
            num: intpoly::neg(&self.num),
            den: self.den.clone(),
        }
    }
    fn mul(&self, o: &Frac) -> Frac {
        Frac {
            num: intpoly::mul(&self.num, &o.num),
            den: intpoly::mul(&self.den, &o.den),
        }
    }
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: &str) -> Result<T, MapError> {
        Err(MapError::Parse {
            pos: self.here(),
            msg: msg.to_string(),
        })
    }

    fn expr(&mut self) -> Result<Frac, MapError> {
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

    fn term(&mut self) -> Result<Frac, MapError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.num.is_empty() {
                        return self.err("division by zero");
                    }
                    acc = acc.mul(&Frac {
                        num: d.den,
                        den: d.num,
                    });
                }
                Some(Tok::X) | Some(Tok::LParen) | Some(Tok::Num(_)) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac, MapError> {
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

    fn power(&mut self) -> Result<Frac, MapError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(e)) if *e <= 64 => *e as u32,
                Some(Tok::Num(_)) => return self.err("exponent too large"),
                _ => return self.err("expected an integer exponent"),
            };
            self.pos += 1;
            return Ok(Frac {
                num: intpoly::pow(&base.num, e),
                den: intpoly::pow(&base.den, e),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Frac, MapError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Frac::poly(intpoly::trim(vec![v.into()])))
            }
            Some(Tok::X) => {
                self.pos += 1;
                Ok(Frac::poly(intpoly::var()))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses an expression into an unreduced `(numerator, denominator)` pair.
pub fn parse_fraction(src: &str) -> Result<(IntPoly, IntPoly), MapError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
    };
    let f = p.expr()?;
    if p.pos != toks.len() {
        return p.err("trailing input");
    }
    Ok((f.num, f.den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ints(v: &[i64]) -> IntPoly {
        intpoly::trim(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn polynomial() {
        let (n, d) = parse_fraction("x^2-1").unwrap();
        assert_eq!(n, ints(&[-1, 0, 1]));
        assert_eq!(d, ints(&[1]));
    }

    #[test]
    fn quotient() {
        let (n, d) = parse_fraction("(x^2-2)/x^2").unwrap();
        assert_eq!(n, ints(&[-2, 0, 1]));
        assert_eq!(d, ints(&[0, 0, 1]));
    }

    #[test]
    fn juxtaposition_and_unary() {
        let (n, _) = parse_fraction("-3x(x+1) + 2").unwrap();
        assert_eq!(n, ints(&[2, -3, -3]));
    }

    #[test]
    fn rejects_nested_or_repeated_division() {
        assert!(matches!(parse_fraction("(x/2)"), Err(MapError::Parse { pos: 2, .. })));
        assert!(matches!(parse_fraction("x/2/3"), Err(MapError::Parse { pos: 3, .. })));
        assert!(matches!(parse_fraction("x^"), Err(MapError::Parse { pos: 2, .. })));
        assert!(matches!(parse_fraction("x $ 1"), Err(MapError::Parse { pos: 2, .. })));
    }
}
