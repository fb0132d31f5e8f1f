//! Text expressions for coefficient fields.
//!
//! Grammar: sums and products of numbers, `i`, `pi`, real coordinates
//! `x1..xm`, complex coordinates `z1..zn` / `zb1..zbn` (with `m = 2n`),
//! parentheses, integer powers `^k`, division by constants, and the
//! functions `exp(p)`, `sqrt(p)`, `pow(p, e)` of polynomial arguments.

use crate::error::{Error, Result};
use crate::field::{Field, Poly};
use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let save = k;
                k += 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                } else {
                    k = save;
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_alphanumeric() {
                k += 1;
            }
            out.push(Tok::Ident(chars[start..k].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected `{op}` at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Field> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Field> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = d
                    .as_poly()
                    .and_then(Poly::as_constant)
                    .filter(|c| c.norm() > 0.0)
                    .ok_or_else(|| Error::Parse("division only by nonzero constants".into()))?;
                acc = acc.scale(c.inv());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Field> {
        if self.eat('-') {
            Ok(self.unary()?.scale(C64::new(-1.0, 0.0)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Field> {
        let base = self.atom()?;
        if self.eat('^') {
            let k = match self.toks.get(self.pos) {
                Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 0.0 => *v as u32,
                _ => return Err(Error::Parse("exponent must be a nonnegative integer".into())),
            };
            self.pos += 1;
            let mut acc = Field::constant(self.nvars, C64::new(1.0, 0.0));
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn poly_arg(&mut self, name: &str) -> Result<Poly> {
        let f = self.expr()?;
        f.as_poly()
            .cloned()
            .ok_or_else(|| Error::Parse(format!("argument of {name} must be a polynomial")))
    }

    fn number(&mut self) -> Result<f64> {
        let neg = self.eat('-');
        match self.toks.get(self.pos) {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(if neg { -v } else { *v })
            }
            _ => Err(Error::Parse("expected a number".into())),
        }
    }

    fn atom(&mut self) -> Result<Field> {
        let tok = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        let m = self.nvars;
        match tok {
            Tok::Num(v) => Ok(Field::constant(m, C64::new(v, 0.0))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Field::constant(m, C64::new(0.0, 1.0))),
                "pi" => Ok(Field::constant(m, C64::new(std::f64::consts::PI, 0.0))),
                "exp" => {
                    self.expect('(')?;
                    let p = self.poly_arg("exp")?;
                    self.expect(')')?;
                    Ok(Field::Exp(p))
                }
                "sqrt" => {
                    self.expect('(')?;
                    let p = self.poly_arg("sqrt")?;
                    self.expect(')')?;
                    Ok(Field::Power {
                        base: p,
                        exponent: 0.5,
                    })
                }
                "pow" => {
                    self.expect('(')?;
                    let p = self.poly_arg("pow")?;
                    self.expect(',')?;
                    let e = self.number()?;
                    self.expect(')')?;
                    Ok(Field::Power { base: p, exponent: e })
                }
                _ => self.variable(&name).map(Field::Poly),
            },
        }
    }

    fn variable(&self, name: &str) -> Result<Poly> {
        let m = self.nvars;
        let index = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix)
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&k| k >= 1)
        };
        let unknown = || Error::Parse(format!("unknown variable `{name}` for {m} real coordinates"));
        if let Some(k) = index("zb") {
            if m % 2 != 0 || k > m / 2 {
                return Err(unknown());
            }
            return Ok(Poly::zbar(m / 2, k - 1));
        }
        if let Some(k) = index("z") {
            if m % 2 != 0 || k > m / 2 {
                return Err(unknown());
            }
            return Ok(Poly::z(m / 2, k - 1));
        }
        if let Some(k) = index("x") {
            if k > m {
                return Err(unknown());
            }
            return Ok(Poly::var(m, k - 1));
        }
        Err(unknown())
    }
}

/// Parse a field expression over `nvars` real coordinates.
pub fn parse_field(text: &str, nvars: usize) -> Result<Field> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        nvars,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_polynomial() {
        let f = parse_field("z1*zb1 + 2*i*x2^2 - 1/2", 2).unwrap();
        let x = [0.3, -0.4];
        let expect = C64::new(0.25, 0.0) + C64::new(0.0, 2.0 * 0.16) - 0.5;
        assert!((f.eval(&x) - expect).norm() < 1e-15);
        assert!(f.as_poly().is_some());
    }

    #[test]
    fn parses_functions() {
        let f = parse_field("zb2*(1 + sqrt(1 - z1*zb1 - z2*zb2))", 4).unwrap();
        let x = [0.1, 0.2, 0.3, -0.1];
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let expect = C64::new(0.3, 0.1) * (1.0 + (1.0 - r2).sqrt());
        assert!((f.eval(&x) - expect).norm() < 1e-14);
        let g = parse_field("pow(1 + x1^2, -1.5) * exp(x1)", 1).unwrap();
        assert!((g.eval(&[1.0]) - C64::new(2f64.powf(-1.5) * 1f64.exp(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_field("z3", 4).is_err());
        assert!(parse_field("x1 +", 1).is_err());
        assert!(parse_field("exp(sqrt(x1))", 1).is_err());
        assert!(parse_field("x1 / x1", 1).is_err());
    }
}
