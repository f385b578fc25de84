//! Text syntax for polynomials in the shift symbol `z`.
//!
//! Accepted forms:
//! - expressions such as `(z-1)^2*(z+1)`, `z^2 + 1`, `0.25*(z-3)`, `z - 0.5i`;
//!   the tokens `i` and `pi` are constants, juxtaposed factors multiply;
//! - the angle form `root:theta=pi,m=2`, meaning `(z - e^{-iθ})^m`, with
//!   several `theta=..,m=..` groups separated by `;` multiplied together.

use super::ComplexPoly;
use crate::error::{Error, Result};
use num_complex::Complex64;

pub fn parse_poly(text: &str) -> Result<ComplexPoly> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("root:") {
        let mut acc = ComplexPoly::one();
        for (theta, m) in parse_angle_groups(rest)? {
            acc = &acc * &ComplexPoly::root_power(theta, m);
        }
        return Ok(acc);
    }
    let mut p = Parser::new(text);
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses `theta=<angle>,m=<int>` groups separated by `;`.
pub fn parse_angle_groups(text: &str) -> Result<Vec<(f64, u32)>> {
    let mut out = Vec::new();
    for group in text.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let mut theta = None;
        let mut m = None;
        for field in group.split(',') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in `{field}`")))?;
            match key.trim() {
                "theta" => theta = Some(parse_real(value)?),
                "m" => {
                    let v: u32 = value.trim().parse().map_err(|_| {
                        Error::Parse(format!("multiplicity `{value}` is not a positive integer"))
                    })?;
                    if v == 0 {
                        return Err(Error::Parse("multiplicity must be positive".into()));
                    }
                    m = Some(v);
                }
                other => return Err(Error::Parse(format!("unknown key `{other}` in `{group}`"))),
            }
        }
        match (theta, m) {
            (Some(t), Some(m)) => out.push((t, m)),
            _ => {
                return Err(Error::Parse(format!(
                    "group `{group}` needs both theta and m"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no theta=..,m=.. groups given".into()));
    }
    Ok(out)
}

/// Real constant expression, e.g. `pi/2`, `-0.3`, `2*pi/3`.
pub fn parse_real(text: &str) -> Result<f64> {
    let p = parse_poly(text)?;
    match p.degree() {
        None => Ok(0.0),
        Some(0) if p.coeff(0).im == 0.0 => Ok(p.coeff(0).re),
        _ => Err(Error::Parse(format!(
            "`{}` is not a real constant",
            text.trim()
        ))),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            src: s.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "{msg} at position {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ComplexPoly> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ComplexPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.degree() != Some(0) {
                        return Err(self.error("division only by nonzero constants"));
                    }
                    acc = acc.scale(d.coeff(0).inv());
                }
                Some(b'(' | b'z' | b'p' | b'i') => acc = &acc * &self.power()?,
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ComplexPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ComplexPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let exp: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.error("expected a nonnegative integer exponent"))?;
            return Ok((0..exp).fold(ComplexPoly::one(), |acc, _| &acc * &base));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ComplexPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(ComplexPoly::z())
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(ComplexPoly::constant(Complex64::new(0.0, 1.0)))
            }
            Some(b'p') if self.src[self.pos..].starts_with(b"pi") => {
                self.pos += 2;
                Ok(ComplexPoly::constant(Complex64::new(
                    std::f64::consts::PI,
                    0.0,
                )))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<ComplexPoly> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let exp_sign = (c == b'+' || c == b'-')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            return Ok(ComplexPoly::constant(Complex64::new(0.0, v)));
        }
        Ok(ComplexPoly::constant(Complex64::new(v, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_form() {
        let p = parse_poly("(z-1)^2*(z+1)").unwrap();
        assert_eq!(p, ComplexPoly::from_real(&[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(parse_poly("(z-1)^2 (z+1)").unwrap(), p);
    }

    #[test]
    fn scalar_and_imaginary() {
        let p = parse_poly("-0.25*(z-3)").unwrap();
        assert_eq!(p, ComplexPoly::from_real(&[0.75, -0.25]));
        let q = parse_poly("z - 0.5i").unwrap();
        assert_eq!(
            q.coeffs(),
            &[Complex64::new(0.0, -0.5), Complex64::new(1.0, 0.0)]
        );
        assert_eq!(
            parse_poly("z-i").unwrap().coeff(0),
            Complex64::new(0.0, -1.0)
        );
    }

    #[test]
    fn angle_form() {
        assert_eq!(
            parse_poly("root:theta=pi,m=1").unwrap(),
            ComplexPoly::from_real(&[1.0, 1.0])
        );
        let p = parse_poly("root:theta=0,m=2;theta=pi,m=1").unwrap();
        assert_eq!(p, parse_poly("(z-1)^2*(z+1)").unwrap());
        assert!((parse_real("1.25").unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(parse_real("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn errors() {
        assert!(parse_poly("(z-1").is_err());
        assert!(parse_poly("z^x").is_err());
        assert!(parse_poly("z $").is_err());
        assert!(parse_poly("root:theta=1").is_err());
        assert!(parse_poly("root:theta=1,m=0").is_err());
        assert!(parse_poly("1e-3*z").is_ok());
    }
}
