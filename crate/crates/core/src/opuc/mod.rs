//! Szegő recursion, Bernstein–Szegő measures, and quadrature of weighted
//! log-integrals. This is the independent oracle for the closed-form sums.

mod quad;
mod trig;

pub use quad::{periodic_mean, QuadConfig, QuadResult};
pub use trig::{trig_expand, Laurent, TrigWeight};

use crate::error::{Error, Result};
use crate::polyring::ComplexPoly;
use crate::seqkit::VerblunskySequence;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest level accepted by quadrature-backed operations.
pub const MAX_QUAD_LEVEL: usize = 4096;

/// `φ_n` and `φ_n^* = z^n conj(φ_n(1/z̄))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoPolyPair {
    pub n: usize,
    pub phi: ComplexPoly,
    pub phi_star: ComplexPoly,
}

/// Runs `φ_{k+1} = (zφ_k − ᾱ_k φ_k^*)/ρ_k`, `φ_{k+1}^* = (φ_k^* − α_k zφ_k)/ρ_k`
/// from `φ_0 = φ_0^* = 1`.
pub fn szego_recurse(alpha: &VerblunskySequence, n: usize) -> Result<SzegoPolyPair> {
    Ok(szego_steps(alpha, n)?.pop().expect("at least φ_0"))
}

/// All pairs `φ_0 … φ_n`.
pub fn szego_steps(alpha: &VerblunskySequence, n: usize) -> Result<Vec<SzegoPolyPair>> {
    if n > alpha.len() {
        return Err(Error::InvalidArgument(format!(
            "degree {n} exceeds sequence horizon {}",
            alpha.len()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut phi = vec![one];
    let mut star = vec![one];
    let mut out = Vec::with_capacity(n + 1);
    out.push(SzegoPolyPair {
        n: 0,
        phi: ComplexPoly::one(),
        phi_star: ComplexPoly::one(),
    });
    for k in 0..n {
        let a = alpha.value(k);
        let modulus = a.norm();
        if !(modulus < 1.0) {
            return Err(Error::InvalidCoefficient { index: k, modulus });
        }
        let rho = (1.0 - a.norm_sqr()).sqrt();
        let mut next = vec![Complex64::default(); k + 2];
        let mut next_star = vec![Complex64::default(); k + 2];
        for j in 0..=k + 1 {
            let z_phi = if j > 0 {
                phi[j - 1]
            } else {
                Complex64::default()
            };
            let s = star.get(j).copied().unwrap_or_default();
            next[j] = (z_phi - a.conj() * s) / rho;
            next_star[j] = (s - a * z_phi) / rho;
        }
        phi = next;
        star = next_star;
        out.push(SzegoPolyPair {
            n: k + 1,
            phi: ComplexPoly::new(phi.clone()),
            phi_star: ComplexPoly::new(star.clone()),
        });
    }
    Ok(out)
}

/// The measure with Verblunsky coefficients `(α_0, …, α_{n-1}, 0, 0, …)`,
/// `dμ_n = dθ / (2π |φ_n(e^{iθ})|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinSzegoMeasure {
    pub level: usize,
    pub pair: SzegoPolyPair,
    /// `φ_n / scale`, with `scale` the largest coefficient modulus.
    normalized: Vec<Complex64>,
    log_scale: f64,
}

impl BernsteinSzegoMeasure {
    pub fn new(alpha: &VerblunskySequence, level: usize) -> Result<Self> {
        let pair = szego_recurse(alpha, level)?;
        let scale = pair.phi.max_abs();
        let normalized = pair.phi.coeffs().iter().map(|c| c / scale).collect();
        Ok(Self {
            level,
            pair,
            normalized,
            log_scale: scale.ln(),
        })
    }

    /// Level equal to the full horizon of `alpha`.
    pub fn full(alpha: &VerblunskySequence) -> Result<Self> {
        Self::new(alpha, alpha.len())
    }

    fn normalized_at(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        self.normalized
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// `log w(θ) = −log |φ_n(e^{iθ})|²`.
    pub fn log_weight(&self, theta: f64) -> f64 {
        -(self.normalized_at(theta).norm_sqr().ln() + 2.0 * self.log_scale)
    }

    /// `w(θ) = 1 / |φ_n(e^{iθ})|²`.
    pub fn weight(&self, theta: f64) -> f64 {
        self.log_weight(theta).exp()
    }

    /// `∫ w dθ/2π`, which is 1 for a probability measure.
    pub fn mass(&self, cfg: &QuadConfig) -> Result<f64> {
        self.check_level()?;
        Ok(periodic_mean(|t| [Complex64::new(self.weight(t), 0.0)], cfg)?.values[0].re)
    }

    fn check_level(&self) -> Result<()> {
        if self.level > MAX_QUAD_LEVEL {
            return Err(Error::InvalidArgument(format!(
                "level {} exceeds the quadrature limit {MAX_QUAD_LEVEL}",
                self.level
            )));
        }
        Ok(())
    }
}

pub fn bs_weight(m: &BernsteinSzegoMeasure, theta: f64) -> f64 {
    m.weight(theta)
}

/// `w_m = ∫ e^{−imθ} log w(θ) dθ/2π` by quadrature.
pub fn log_moment_quad(
    m: &BernsteinSzegoMeasure,
    order: i64,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    m.check_level()?;
    let res = periodic_mean(
        |t| [Complex64::from_polar(1.0, -(order as f64) * t) * m.log_weight(t)],
        cfg,
    )?;
    Ok(res.values[0])
}

/// `w_0, …, w_{K-1}` from one quadrature pass.
pub fn log_moments_quad<const K: usize>(
    m: &BernsteinSzegoMeasure,
    cfg: &QuadConfig,
) -> Result<[Complex64; K]> {
    m.check_level()?;
    let res = periodic_mean(
        |t| {
            let lw = m.log_weight(t);
            let step = Complex64::from_polar(1.0, -t);
            let mut e = Complex64::new(1.0, 0.0);
            let mut out = [Complex64::default(); K];
            for o in out.iter_mut() {
                *o = e * lw;
                e *= step;
            }
            out
        },
        cfg,
    )?;
    Ok(res.values)
}

/// `∫ T(θ) log w(θ) dθ/2π` by direct quadrature of the product.
pub fn z_quad(m: &BernsteinSzegoMeasure, weight: &TrigWeight, cfg: &QuadConfig) -> Result<f64> {
    m.check_level()?;
    let res = periodic_mean(
        |t| [Complex64::new(weight.eval(t) * m.log_weight(t), 0.0)],
        cfg,
    )?;
    Ok(res.values[0].re)
}

/// `Σ_m c_m w_{−m}` for `T = Σ c_m e^{imθ}`, given `w_0, w_1, …` (with `w_{−m} = conj(w_m)`).
pub fn assemble_from_moments(laurent: &Laurent, moments: &[Complex64]) -> Result<f64> {
    let d = laurent.degree();
    if moments.len() <= d {
        return Err(Error::InvalidArgument(format!(
            "{} moments given, weight has degree {d}",
            moments.len()
        )));
    }
    let mut total = laurent.coeff(0) * moments[0];
    for m in 1..=d as isize {
        let w = moments[m as usize];
        total += laurent.coeff(m) * w.conj() + laurent.coeff(-m) * w;
    }
    Ok(total.re)
}

/// The same integral as [`z_quad`], assembled from quadrature moments.
pub fn z_quad_via_moments(
    m: &BernsteinSzegoMeasure,
    weight: &TrigWeight,
    cfg: &QuadConfig,
) -> Result<f64> {
    let laurent = trig_expand(weight);
    let moments = (0..=laurent.degree() as i64)
        .map(|k| log_moment_quad(m, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble_from_moments(&laurent, &moments)
}
