use crate::error::{Error, Result};
use crate::polyring::unit_phase;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Laurent polynomial `Σ_{m=-d}^{d} c_m e^{imθ}`; `coeffs[m + d] = c_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    pub coeffs: Vec<Complex64>,
}

impl Laurent {
    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeff(&self, m: isize) -> Complex64 {
        let d = self.degree() as isize;
        if m.abs() > d {
            Complex64::default()
        } else {
            self.coeffs[(m + d) as usize]
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let d = self.degree() as isize;
        let v: Complex64 = (-d..=d)
            .map(|m| self.coeff(m) * Complex64::from_polar(1.0, m as f64 * theta))
            .sum();
        v.re
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Laurent { coeffs: out }
    }

    /// Largest `|c_{-m} − conj(c_m)|`.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.degree() as isize;
        (0..=d)
            .map(|m| (self.coeff(-m) - self.coeff(m).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Weight `Π_k (1 − cos(θ − θ_k))^{m_k}`, or an explicit Laurent polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigWeight {
    pub factors: Vec<(f64, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laurent: Option<Laurent>,
}

impl TrigWeight {
    pub fn new(factors: Vec<(f64, u32)>) -> Result<Self> {
        if factors.iter().any(|&(t, m)| m == 0 || !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "trig weight needs finite angles and positive multiplicities".into(),
            ));
        }
        Ok(Self {
            factors,
            laurent: None,
        })
    }

    /// `(1 − cos θ)²(1 + cos θ)`.
    pub fn szego_cubic() -> Self {
        Self::new(vec![(0.0, 2), (std::f64::consts::PI, 1)]).expect("valid")
    }

    /// Explicit coefficients `c_{-d}..c_d`; must be conjugate symmetric.
    pub fn from_laurent(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidArgument(
                "Laurent coefficient list must have odd length".into(),
            ));
        }
        let laurent = Laurent { coeffs };
        let scale = laurent.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if laurent.symmetry_defect() > 1e-12 * scale {
            return Err(Error::InvalidArgument(
                "Laurent coefficients are not conjugate symmetric".into(),
            ));
        }
        Ok(Self {
            factors: Vec::new(),
            laurent: Some(laurent),
        })
    }

    /// Parses `theta=0,m=2;theta=pi,m=1`.
    pub fn parse(text: &str) -> Result<Self> {
        let groups = crate::polyring::parse::parse_angle_groups(text)?;
        Self::new(groups)
    }

    /// Direct evaluation of the product form.
    pub fn eval(&self, theta: f64) -> f64 {
        match &self.laurent {
            Some(l) if self.factors.is_empty() => l.eval(theta),
            _ => self
                .factors
                .iter()
                .map(|&(t, m)| (1.0 - (theta - t).cos()).powi(m as i32))
                .product(),
        }
    }
}

/// Laurent coefficients of a trig weight.
///
/// `1 − cos(θ − θ_0) = 1 − ½e^{−iθ_0} e^{iθ} − ½e^{iθ_0} e^{−iθ}`; the
/// factors are multiplied out by convolution.
pub fn trig_expand(w: &TrigWeight) -> Laurent {
    if let Some(l) = &w.laurent {
        return l.clone();
    }
    let mut acc = Laurent {
        coeffs: vec![Complex64::new(1.0, 0.0)],
    };
    for &(theta, m) in &w.factors {
        let f = Laurent {
            coeffs: vec![
                -0.5 * unit_phase(theta),
                Complex64::new(1.0, 0.0),
                -0.5 * unit_phase(-theta),
            ],
        };
        for _ in 0..m {
            acc = acc.mul(&f);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn cubic_weight_coefficients_exact() {
        let l = trig_expand(&TrigWeight::szego_cubic());
        assert_eq!(l.degree(), 3);
        let expected = [(0, 0.5), (1, -0.125), (2, -0.25), (3, 0.125)];
        for (m, c) in expected {
            assert_eq!(l.coeff(m), re(c), "c_{m}");
            assert_eq!(l.coeff(-m), re(c), "c_-{m}");
        }
    }

    #[test]
    fn single_factor() {
        let l = trig_expand(&TrigWeight::new(vec![(0.0, 1)]).unwrap());
        assert_eq!(l.coeffs, vec![re(-0.5), re(1.0), re(-0.5)]);
        let l = trig_expand(&TrigWeight::new(vec![(PI, 1)]).unwrap());
        assert_eq!(l.coeffs, vec![re(0.5), re(1.0), re(0.5)]);
    }

    #[test]
    fn laurent_matches_product() {
        let w = TrigWeight::new(vec![(0.3, 2), (2.0, 1), (-1.1, 3)]).unwrap();
        let l = trig_expand(&w);
        assert!(l.symmetry_defect() < 1e-15);
        for j in 0..1000 {
            let t = j as f64 * 0.00628318;
            assert!((l.eval(t) - w.eval(t)).abs() < 1e-12);
            assert!(w.eval(t) >= 0.0);
        }
    }

    #[test]
    fn parse_weight() {
        assert_eq!(
            TrigWeight::parse("theta=0,m=2;theta=pi,m=1").unwrap(),
            TrigWeight::szego_cubic()
        );
        assert!(TrigWeight::parse("theta=0").is_err());
    }

    #[test]
    fn explicit_laurent() {
        let w = TrigWeight::from_laurent(vec![re(-0.5), re(1.0), re(-0.5)]).unwrap();
        assert!((w.eval(0.7) - (1.0 - 0.7f64.cos())).abs() < 1e-15);
        assert!(
            TrigWeight::from_laurent(vec![re(-0.5), re(1.0), Complex64::new(0.0, 0.5)]).is_err()
        );
    }
}
