//! Dense polynomials over ℂ, Euclid/Bezout machinery, and the coprime
//! decomposition of sequences.

mod bezout;
pub(crate) mod parse;

pub use bezout::{
    bezout_residual, bezout_system, bezout_tolerance, decompose, extended_gcd,
    ComponentDiagnostics, DecompResult, Egcd,
};
pub use parse::parse_poly;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Relative threshold for degree bookkeeping in Euclid steps.
pub const EPS_POLY: f64 = 1e-12;

/// `e^{iθ}` with exact values at multiples of π/2.
pub fn unit_phase(theta: f64) -> Complex64 {
    let snap = |v: f64| {
        if v.abs() < 1e-15 {
            0.0
        } else if (v.abs() - 1.0).abs() < 1e-15 {
            v.signum()
        } else {
            v
        }
    };
    Complex64::new(snap(theta.cos()), snap(theta.sin()))
}

/// Polynomial with `coeffs[j]` the coefficient of `z^j`. The zero polynomial
/// has no coefficients; otherwise the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for ComplexPoly {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs)
    }
}

impl From<ComplexPoly> for Vec<Complex64> {
    fn from(p: ComplexPoly) -> Self {
        p.coeffs
    }
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The shift symbol `z`.
    pub fn z() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `(z - root)^m`.
    pub fn linear_power(root: Complex64, m: u32) -> Self {
        let factor = Self::new(vec![-root, Complex64::new(1.0, 0.0)]);
        (0..m).fold(Self::one(), |acc, _| &acc * &factor)
    }

    /// `(z - e^{-iθ})^m`, the symbol of `(S - e^{-iθ})^m`.
    pub fn root_power(theta: f64, m: u32) -> Self {
        Self::linear_power(unit_phase(-theta), m)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn div_scalar(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a / c).collect())
    }

    pub fn monic(&self) -> Option<Self> {
        self.leading().map(|lc| self.div_scalar(lc))
    }

    /// Drops trailing coefficients with modulus `<= eps * scale`.
    pub fn trimmed(mut self, scale: f64, eps: f64) -> Self {
        let cut = eps * scale;
        while self.coeffs.last().is_some_and(|c| c.norm() <= cut) {
            self.coeffs.pop();
        }
        self
    }

    /// Reversed conjugate at formal degree `n`: `z^n conj(p(1/z̄))`.
    pub fn reversed_conj(&self, n: usize) -> Self {
        let mut out = vec![Complex64::default(); n + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            assert!(j <= n, "formal degree below actual degree");
            out[n - j] = c.conj();
        }
        Self::new(out)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// `p(x)` for a polynomial argument `x`.
    pub fn compose(&self, x: &ComplexPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * x) + &Self::constant(c))
    }

    /// `a = q·b + r` with `deg r < deg b`; the remainder is trimmed at
    /// [`EPS_POLY`] relative to the largest input coefficient.
    pub fn divmod(&self, b: &ComplexPoly) -> Result<(ComplexPoly, ComplexPoly)> {
        self.divmod_scaled(b, self.max_abs().max(b.max_abs()))
    }

    /// As [`divmod`](Self::divmod), trimming the remainder relative to `scale`.
    pub fn divmod_scaled(&self, b: &ComplexPoly, scale: f64) -> Result<(ComplexPoly, ComplexPoly)> {
        let Some(db) = b.degree() else {
            return Err(Error::InvalidArgument(
                "division by the zero polynomial".into(),
            ));
        };
        let Some(da) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if da < db {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = b.coeffs[db].inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::default(); da - db + 1];
        for i in (0..=da - db).rev() {
            let q = rem[i + db] * lead_inv;
            quot[i] = q;
            for (j, bc) in b.coeffs.iter().enumerate() {
                rem[i + j] -= q * bc;
            }
            rem[i + db] = Complex64::default();
        }
        rem.truncate(db);
        Ok((Self::new(quot), Self::new(rem).trimmed(scale, EPS_POLY)))
    }

    pub fn rem(&self, b: &ComplexPoly) -> Result<ComplexPoly> {
        Ok(self.divmod(b)?.1)
    }

    /// Sup-norm of the coefficientwise difference.
    pub fn distance(&self, other: &ComplexPoly) -> f64 {
        (self - other).max_abs()
    }

    pub fn product<'a, I: IntoIterator<Item = &'a ComplexPoly>>(iter: I) -> ComplexPoly {
        iter.into_iter().fold(Self::one(), |acc, p| &acc * p)
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![Complex64::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $m(self, rhs: ComplexPoly) -> ComplexPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Complex64::default() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", fmt_coeff(*c))?,
                1 => write!(f, "{}*z", fmt_coeff(*c))?,
                _ => write!(f, "{}*z^{}", fmt_coeff(*c), j)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_of_difference_symbols() {
        let p = &ComplexPoly::linear_power(c(1.0, 0.0), 2) * &ComplexPoly::from_real(&[1.0, 1.0]);
        assert_eq!(p, ComplexPoly::from_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn divmod_simple() {
        let a = ComplexPoly::from_real(&[1.0, 0.0, 1.0]);
        let (q, r) = a.divmod(&ComplexPoly::z()).unwrap();
        assert_eq!(q, ComplexPoly::z());
        assert_eq!(r, ComplexPoly::one());
    }

    #[test]
    fn divmod_by_zero_rejected() {
        let a = ComplexPoly::z();
        assert!(matches!(
            a.divmod(&ComplexPoly::zero()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn divmod_reconstructs() {
        let a = ComplexPoly::new(vec![
            c(1.0, 2.0),
            c(-0.5, 0.3),
            c(2.0, 0.0),
            c(0.1, -1.0),
            c(3.0, 0.5),
        ]);
        let b = ComplexPoly::new(vec![c(0.2, 0.0), c(1.0, 1.0), c(-2.0, 0.0)]);
        let (q, r) = a.divmod(&b).unwrap();
        assert!(r.degree().unwrap() < b.degree().unwrap());
        assert!((&(&q * &b) + &r).distance(&a) < 1e-14);
    }

    #[test]
    fn root_power_at_pi_is_exact() {
        assert_eq!(
            ComplexPoly::root_power(std::f64::consts::PI, 1),
            ComplexPoly::from_real(&[1.0, 1.0])
        );
        assert_eq!(
            ComplexPoly::root_power(0.0, 2),
            ComplexPoly::from_real(&[1.0, -2.0, 1.0])
        );
        let p = ComplexPoly::root_power(std::f64::consts::FRAC_PI_2, 1);
        assert_eq!(p.coeffs(), &[c(0.0, 1.0), c(1.0, 0.0)]);
    }

    #[test]
    fn reversed_conj_of_linear() {
        let p = ComplexPoly::new(vec![c(-0.5, 0.25), c(1.0, 0.0)]);
        assert_eq!(p.reversed_conj(1).coeffs(), &[c(1.0, 0.0), c(-0.5, -0.25)]);
    }

    #[test]
    fn serde_as_pairs() {
        let p = ComplexPoly::new(vec![c(0.75, 0.0), c(-0.25, 0.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0.75,0.0],[-0.25,0.0]]");
        let back: ComplexPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
