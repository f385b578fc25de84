use super::ComplexPoly;
use crate::error::{Error, Result};
use crate::seqkit::{apply_shift_poly, lp_diagnose, LpDiagnostics};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Output of [`extended_gcd`]: `s·a + t·b = gcd` with `gcd` monic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Egcd {
    pub gcd: ComplexPoly,
    pub s: ComplexPoly,
    pub t: ComplexPoly,
    pub residual: f64,
}

/// Extended Euclid over ℂ[z].
///
/// Remainders are trimmed at [`EPS_POLY`] relative to the largest input
/// coefficient. The returned cofactors are the reduced representative:
/// `s` is taken modulo `b / gcd` and `t` recomputed from it, so that
/// `deg s < deg b - deg g` and `deg t < deg a - deg g`.
pub fn extended_gcd(a: &ComplexPoly, b: &ComplexPoly) -> Result<Egcd> {
    let scale = a.max_abs().max(b.max_abs());
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (ComplexPoly::one(), ComplexPoly::zero());
    let (mut t0, mut t1) = (ComplexPoly::zero(), ComplexPoly::one());
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidArgument(
            "extended_gcd of two zero polynomials".into(),
        ));
    }
    while !r1.is_zero() {
        let (q, r) = r0.divmod_scaled(&r1, scale)?;
        let s2 = &s0 - &(&q * &s1);
        let t2 = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let lc = r0.leading().expect("nonzero gcd");
    let gcd = r0.div_scalar(lc);
    let mut s = s0.div_scalar(lc);
    let mut t = t0.div_scalar(lc);

    if !a.is_zero() && !b.is_zero() {
        let (b_red, _) = b.divmod(&gcd)?;
        s = s.rem(&b_red)?;
        let (q, _) = (&gcd - &(&s * a)).divmod(b)?;
        t = q;
    }
    let residual = (&(&(&s * a) + &(&t * b)) - &gcd).max_abs();
    Ok(Egcd {
        gcd,
        s,
        t,
        residual,
    })
}

/// Sup-norm of the coefficients of `Σ_j U_j Π_{i≠j} P_i − 1`.
pub fn bezout_residual(polys: &[ComplexPoly], cofactors: &[ComplexPoly]) -> f64 {
    let total =
        polys
            .iter()
            .enumerate()
            .zip(cofactors)
            .fold(ComplexPoly::zero(), |acc, ((j, _), u)| {
                let others = ComplexPoly::product(
                    polys
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != j)
                        .map(|(_, p)| p),
                );
                &acc + &(u * &others)
            });
    (&total - &ComplexPoly::one()).max_abs()
}

/// Cofactors `U_1..U_l` with `Σ_j U_j Π_{i≠j} P_i = 1` for pairwise coprime `P_j`.
///
/// Built by induction on `l`; afterwards every `U_j` with `j < l` is reduced
/// modulo `P_j` and the last cofactor absorbs the quotients, which keeps the
/// identity exact in exact arithmetic. For `l = 1` the product over `i ≠ j`
/// is empty and `U_1 = 1`.
pub fn bezout_system(polys: &[ComplexPoly]) -> Result<Vec<ComplexPoly>> {
    if polys.is_empty() {
        return Err(Error::InvalidArgument(
            "bezout_system needs at least one polynomial".into(),
        ));
    }
    if let Some(j) = polys.iter().position(ComplexPoly::is_zero) {
        return Err(Error::InvalidArgument(format!(
            "polynomial {} is zero",
            j + 1
        )));
    }
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            let g = extended_gcd(&polys[i], &polys[j])?.gcd;
            let gcd_degree = g.degree().unwrap_or(0);
            if gcd_degree > 0 {
                return Err(Error::CoprimalityViolation {
                    first: i + 1,
                    second: j + 1,
                    gcd_degree,
                });
            }
        }
    }

    let mut cofactors = vec![ComplexPoly::one()];
    let mut prefix = polys[0].clone();
    for p in &polys[1..] {
        let eg = extended_gcd(&prefix, p)?;
        // eg.gcd is the constant 1 here; s·prefix + t·p = 1.
        for u in &mut cofactors {
            *u = &*u * &eg.t;
        }
        cofactors.push(eg.s);
        prefix = &prefix * p;
    }

    let l = polys.len();
    if l > 1 {
        let mut carry = ComplexPoly::zero();
        for j in 0..l - 1 {
            let (q, r) = cofactors[j].divmod(&polys[j])?;
            cofactors[j] = r;
            carry = &carry + &q;
        }
        cofactors[l - 1] = &cofactors[l - 1] + &(&carry * &polys[l - 1]);
    }
    Ok(cofactors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDiagnostics {
    /// Diagnostics of `β^(j)` in ℓ^{p_j}.
    pub component: LpDiagnostics,
    /// Diagnostics of `P_j(S) β^(j)` in ℓ².
    pub filtered: LpDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompResult {
    pub polys: Vec<ComplexPoly>,
    pub cofactors: Vec<ComplexPoly>,
    pub components: Vec<Vec<Complex64>>,
    pub bezout_residual: f64,
    pub reconstruction_residual: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<ComponentDiagnostics>,
}

impl DecompResult {
    /// Runs `lp_diagnose(β^(j), p_j)` and `lp_diagnose(P_j(S) β^(j), 2)` per component.
    pub fn diagnose(&mut self, exponents: &[f64], horizons: &[usize]) -> Result<()> {
        if exponents.len() != self.components.len() {
            return Err(Error::InvalidArgument(format!(
                "{} exponents given for {} components",
                exponents.len(),
                self.components.len()
            )));
        }
        self.diagnostics = self
            .components
            .iter()
            .zip(&self.polys)
            .zip(exponents)
            .map(|((beta, p), &exp)| {
                Ok(ComponentDiagnostics {
                    component: lp_diagnose(beta, exp, horizons)?,
                    filtered: lp_diagnose(&apply_shift_poly(p, beta)?, 2.0, horizons)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(())
    }
}

/// `β^(j) = U_j(S) Π_{i≠j} P_i(S) α`, with residuals of the Bezout identity
/// and of `α = Σ_j β^(j)`.
pub fn decompose(alpha: &[Complex64], polys: &[ComplexPoly]) -> Result<DecompResult> {
    let cofactors = bezout_system(polys)?;
    let components = cofactors
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let others = ComplexPoly::product(
                polys
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, p)| p),
            );
            apply_shift_poly(&(u * &others), alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let reconstruction_residual = alpha
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let total: Complex64 = components.iter().map(|b| b[n]).sum();
            (a - total).norm()
        })
        .fold(0.0, f64::max);
    Ok(DecompResult {
        bezout_residual: bezout_residual(polys, &cofactors),
        polys: polys.to_vec(),
        cofactors,
        components,
        reconstruction_residual,
        diagnostics: Vec::new(),
    })
}

/// Tolerance of the per-call Bezout residual check.
pub fn bezout_tolerance(polys: &[ComplexPoly]) -> f64 {
    1e-10 * (1.0 + polys.iter().map(ComplexPoly::max_abs).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quarter_example() -> (ComplexPoly, ComplexPoly) {
        (
            ComplexPoly::linear_power(c(1.0, 0.0), 2),
            ComplexPoly::from_real(&[1.0, 1.0]),
        )
    }

    #[test]
    fn egcd_of_square_and_linear() {
        let (a, b) = quarter_example();
        let eg = extended_gcd(&a, &b).unwrap();
        assert_eq!(eg.gcd, ComplexPoly::one());
        assert!(eg.residual < 1e-15);
        assert!(eg.s.distance(&ComplexPoly::from_real(&[0.25])) < 1e-15);
        assert!(eg.t.distance(&ComplexPoly::from_real(&[0.75, -0.25])) < 1e-15);
    }

    #[test]
    fn egcd_with_itself() {
        let a = ComplexPoly::from_real(&[-1.0, 1.0]);
        let eg = extended_gcd(&a, &a).unwrap();
        assert_eq!(eg.gcd, a);
        assert!(eg.residual < 1e-15);
    }

    #[test]
    fn egcd_zero_inputs() {
        assert!(extended_gcd(&ComplexPoly::zero(), &ComplexPoly::zero()).is_err());
        let b = ComplexPoly::from_real(&[2.0, 4.0]);
        let eg = extended_gcd(&ComplexPoly::zero(), &b).unwrap();
        assert_eq!(eg.gcd, ComplexPoly::from_real(&[0.5, 1.0]));
        assert!(eg.residual < 1e-15);
    }

    #[test]
    fn egcd_common_factor() {
        let common = ComplexPoly::from_real(&[-0.5, 1.0]);
        let a = &common * &ComplexPoly::from_real(&[2.0, 0.0, 1.0]);
        let b = &common * &ComplexPoly::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let eg = extended_gcd(&a, &b).unwrap();
        assert!(eg.gcd.distance(&common) < 1e-13);
        assert!(eg.residual < 1e-13);
        assert!(eg.s.degree().is_none_or(|d| d < 1));
        assert!(eg.t.degree().is_none_or(|d| d < 2));
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> ComplexPoly {
        ComplexPoly::new(
            (0..=deg)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    #[test]
    fn random_coprime_cubics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_poly(&mut rng, 3);
            let b = random_poly(&mut rng, 3);
            let eg = extended_gcd(&a, &b).unwrap();
            assert_eq!(eg.gcd.degree(), Some(0));
            let check = (&(&(&eg.s * &a) + &(&eg.t * &b)) - &eg.gcd).max_abs();
            assert!(check < 1e-10, "{check}");
            assert!(eg.s.degree().is_none_or(|d| d < 3));
            assert!(eg.t.degree().is_none_or(|d| d < 3));
        }
    }

    #[test]
    fn bezout_quarter_example() {
        let (p1, p2) = quarter_example();
        let u = bezout_system(&[p1.clone(), p2.clone()]).unwrap();
        assert!(u[0].distance(&ComplexPoly::from_real(&[0.75, -0.25])) < 1e-15);
        assert!(u[1].distance(&ComplexPoly::from_real(&[0.25])) < 1e-15);
        assert!(bezout_residual(&[p1, p2], &u) < 1e-15);
    }

    #[test]
    fn bezout_degree_one() {
        let polys = [ComplexPoly::z(), ComplexPoly::from_real(&[-1.0, 1.0])];
        let u = bezout_system(&polys).unwrap();
        assert!(u[0].distance(&ComplexPoly::from_real(&[-1.0])) < 1e-15);
        assert!(u[1].distance(&ComplexPoly::from_real(&[1.0])) < 1e-15);
    }

    #[test]
    fn bezout_three_factors() {
        let polys = [
            ComplexPoly::from_real(&[-1.0, 1.0]),
            ComplexPoly::from_real(&[1.0, 1.0]),
            ComplexPoly::new(vec![c(0.0, -1.0), c(1.0, 0.0)]),
        ];
        let u = bezout_system(&polys).unwrap();
        assert!(bezout_residual(&polys, &u) < 1e-10);
        for (uj, pj) in u.iter().zip(&polys).take(2) {
            assert!(uj.degree().is_none_or(|d| d < pj.degree().unwrap()));
        }
    }

    #[test]
    fn bezout_single() {
        let u = bezout_system(&[ComplexPoly::from_real(&[1.0, 1.0])]).unwrap();
        assert_eq!(u, vec![ComplexPoly::one()]);
    }

    #[test]
    fn bezout_rejects_common_root() {
        let polys = [
            ComplexPoly::from_real(&[1.0, 1.0]),
            ComplexPoly::from_real(&[-1.0, 1.0]),
            ComplexPoly::from_real(&[-1.0, 0.0, 1.0]),
        ];
        match bezout_system(&polys) {
            Err(Error::CoprimalityViolation {
                first,
                second,
                gcd_degree,
            }) => {
                assert_eq!((first, second, gcd_degree), (1, 3, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decompose_matches_closed_forms() {
        let (p1, p2) = quarter_example();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alpha: Vec<Complex64> = (0..40)
            .map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
            .collect();
        let d = decompose(&alpha, &[p1, p2]).unwrap();
        let beta1 = apply_shift_poly(
            &ComplexPoly::from_real(&[0.75, -0.25]).mul(ComplexPoly::from_real(&[1.0, 1.0])),
            &alpha,
        )
        .unwrap();
        let beta2 = apply_shift_poly(&ComplexPoly::from_real(&[0.25, -0.5, 0.25]), &alpha).unwrap();
        for n in 0..alpha.len() {
            assert!((d.components[0][n] - beta1[n]).norm() < 1e-15);
            assert!((d.components[1][n] - beta2[n]).norm() < 1e-15);
        }
        assert!(d.reconstruction_residual < 1e-12);
    }

    #[test]
    fn decompose_zero_sequence() {
        let (p1, p2) = quarter_example();
        let d = decompose(&[Complex64::default(); 10], &[p1, p2]).unwrap();
        assert!(d
            .components
            .iter()
            .flatten()
            .all(|b| *b == Complex64::default()));
        assert_eq!(d.reconstruction_residual, 0.0);
    }

    use std::ops::Mul;
}
