//! Verblunsky sequences, shift-operator polynomials acting on sequences, and
//! numerical ℓᵖ diagnostics.

pub(crate) mod lp;

pub use lp::{dyadic_horizons, lp_diagnose, Fit, FitModel, LpDiagnostics, Verdict};

use crate::error::{Error, Result};
use crate::polyring::ComplexPoly;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Parameters of a formula-generated sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaParams {
    pub scale: f64,
    pub exponent: f64,
}

impl Default for FormulaParams {
    fn default() -> Self {
        Self {
            scale: 1.0 / 3.0,
            exponent: 0.25,
        }
    }
}

/// On-disk / command-line description of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SequenceSpec {
    Explicit {
        values: Vec<Complex64>,
    },
    Formula {
        name: String,
        #[serde(default)]
        params: FormulaParams,
        horizon: usize,
    },
}

impl SequenceSpec {
    pub fn corollary(horizon: usize) -> Self {
        SequenceSpec::Formula {
            name: "corollary".into(),
            params: FormulaParams::default(),
            horizon,
        }
    }

    /// Parses inline JSON, or reads the file at `source` if it is not JSON.
    /// A command output whose `config.sequence` holds a spec is accepted too.
    pub fn load(source: &str) -> Result<Self> {
        let trimmed = source.trim_start();
        let text = if trimmed.starts_with('{') {
            source.to_owned()
        } else {
            std::fs::read_to_string(Path::new(source))?
        };
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("sequence: {e}")))?;
        if let Some(inner) = value.pointer_mut("/config/sequence") {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| Error::Parse(format!("sequence: {e}")))
    }

    /// Same sequence at a different horizon. Explicit sequences are
    /// truncated or zero-padded.
    pub fn with_horizon(&self, horizon: usize) -> Self {
        match self {
            SequenceSpec::Explicit { values } => {
                let mut values = values.clone();
                values.resize(horizon, Complex64::default());
                SequenceSpec::Explicit { values }
            }
            SequenceSpec::Formula { name, params, .. } => SequenceSpec::Formula {
                name: name.clone(),
                params: *params,
                horizon,
            },
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            SequenceSpec::Explicit { values } => values.len(),
            SequenceSpec::Formula { horizon, .. } => *horizon,
        }
    }
}

/// Verblunsky coefficients `α_0..α_{N-1}` in the open unit disk, extended by
/// `α_k = 0` for `k ≥ N`, `α_{-1} = -1` and `α_k = 0` for `k ≤ -2`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskySequence {
    values: Vec<Complex64>,
    spec: SequenceSpec,
}

impl VerblunskySequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        validate(&values)?;
        Ok(Self {
            spec: SequenceSpec::Explicit {
                values: values.clone(),
            },
            values,
        })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(horizon: usize) -> Self {
        Self::new(vec![Complex64::default(); horizon]).expect("zeros are valid")
    }

    pub fn from_spec(spec: &SequenceSpec) -> Result<Self> {
        let values = match spec {
            SequenceSpec::Explicit { values } => values.clone(),
            SequenceSpec::Formula {
                name,
                params,
                horizon,
            } => match name.as_str() {
                "corollary" => corollary_values(*horizon, *params),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown sequence formula `{other}`"
                    )))
                }
            },
        };
        validate(&values)?;
        Ok(Self {
            values,
            spec: spec.clone(),
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    /// Extended accessor with the negative-index conventions.
    pub fn ext(&self, k: isize) -> Complex64 {
        match k {
            -1 => Complex64::new(-1.0, 0.0),
            k if k < -1 => Complex64::default(),
            k => self.values.get(k as usize).copied().unwrap_or_default(),
        }
    }

    /// `ρ_k² = 1 − |ext(k)|²`.
    pub fn rho2(&self, k: isize) -> f64 {
        1.0 - self.ext(k).norm_sqr()
    }

    /// The Bernstein–Szegő truncation `α^{(n)} = (α_0, …, α_{n-1}, 0, …)`.
    pub fn truncated(&self, n: usize) -> Self {
        let values = self.values[..n.min(self.len())].to_vec();
        Self {
            spec: SequenceSpec::Explicit {
                values: values.clone(),
            },
            values,
        }
    }
}

fn validate(values: &[Complex64]) -> Result<()> {
    for (index, a) in values.iter().enumerate() {
        let modulus = a.norm();
        if !(modulus < 1.0) {
            return Err(Error::InvalidCoefficient { index, modulus });
        }
    }
    Ok(())
}

fn corollary_values(horizon: usize, params: FormulaParams) -> Vec<Complex64> {
    (0..horizon)
        .map(|n| {
            let num = if n % 2 == 0 { 2.0 } else { 0.0 };
            Complex64::new(
                params.scale * num / ((n + 1) as f64).powf(params.exponent),
                0.0,
            )
        })
        .collect()
}

/// `α_n = (1 + (−1)^n) / (3 (n+1)^{1/4})` for `0 ≤ n < horizon`.
pub fn corollary_sequence(horizon: usize) -> Result<VerblunskySequence> {
    if horizon == 0 {
        return Err(Error::InvalidArgument(
            "corollary sequence needs horizon >= 1".into(),
        ));
    }
    VerblunskySequence::from_spec(&SequenceSpec::corollary(horizon))
}

/// `len` coefficients uniform in the disk of the given radius.
pub fn random_sequence(seed: u64, len: usize, radius: f64) -> Result<VerblunskySequence> {
    use rand::{Rng, SeedableRng};
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} must lie in [0, 1)"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    VerblunskySequence::new(
        (0..len)
            .map(|_| {
                Complex64::from_polar(
                    radius * rng.gen::<f64>().sqrt(),
                    rng.gen::<f64>() * std::f64::consts::TAU,
                )
            })
            .collect(),
    )
}

/// `(P(S)x)_n = Σ_j c_j x_{n+j}` for `0 ≤ n < N`, with `x_m = 0` for `m ≥ N`.
pub fn apply_shift_poly(p: &ComplexPoly, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("shift polynomial is zero".into()));
    }
    let n = x.len();
    Ok((0..n)
        .map(|i| {
            p.coeffs()
                .iter()
                .enumerate()
                .take_while(|(j, _)| i + j < n)
                .map(|(j, c)| c * x[i + j])
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ext_conventions() {
        let a = VerblunskySequence::from_real(&[0.5, 0.25]).unwrap();
        assert_eq!(a.ext(-1), c(-1.0, 0.0));
        assert_eq!(a.ext(-2), c(0.0, 0.0));
        assert_eq!(a.ext(-3), c(0.0, 0.0));
        assert_eq!(a.ext(1), c(0.25, 0.0));
        assert_eq!(a.ext(2), c(0.0, 0.0));
        assert_eq!(a.rho2(-1), 0.0);
        assert_eq!(a.rho2(-2), 1.0);
        assert_eq!(a.rho2(0), 0.75);
        assert_eq!(a.rho2(5), 1.0);
    }

    #[test]
    fn rejects_outside_disk() {
        match VerblunskySequence::from_real(&[0.1, 1.0]) {
            Err(Error::InvalidCoefficient { index, modulus }) => {
                assert_eq!(index, 1);
                assert_eq!(modulus, 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(VerblunskySequence::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn corollary_values_match_formula() {
        assert_eq!(corollary_sequence(1).unwrap().value(0), c(2.0 / 3.0, 0.0));
        assert_eq!(corollary_sequence(2).unwrap().value(1), c(0.0, 0.0));
        let a2 = corollary_sequence(3).unwrap().value(2).re;
        assert!((a2 - 0.506_557_1).abs() < 1e-7, "{a2}");
        assert!((a2 - 2.0 / (3.0 * 3f64.powf(0.25))).abs() < 1e-15);
        assert!(corollary_sequence(0).is_err());
    }

    #[test]
    fn shift_by_z() {
        let x = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let y = apply_shift_poly(&ComplexPoly::z(), &x).unwrap();
        assert_eq!(y, vec![c(2.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn second_difference_kills_constants() {
        let x = vec![c(0.3, -0.1); 10];
        let y = apply_shift_poly(&ComplexPoly::from_real(&[1.0, -2.0, 1.0]), &x).unwrap();
        assert!(y[..8].iter().all(|v| v.norm() < 1e-16));
    }

    #[test]
    fn zero_poly_rejected() {
        assert!(apply_shift_poly(&ComplexPoly::zero(), &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn spec_json_forms() {
        let e = SequenceSpec::load(r#"{"kind":"explicit","values":[[0.5,0]]}"#).unwrap();
        assert_eq!(
            e,
            SequenceSpec::Explicit {
                values: vec![c(0.5, 0.0)]
            }
        );
        let f = SequenceSpec::load(
            r#"{"kind":"formula","name":"corollary","params":{"scale":0.3333333333333333,"exponent":0.25},"horizon":5}"#,
        )
        .unwrap();
        let a = VerblunskySequence::from_spec(&f).unwrap();
        assert_eq!(a.values(), corollary_sequence(5).unwrap().values());
        let bad =
            SequenceSpec::load(r#"{"kind":"explicit","values":[[0.5,0],[0.9,0.9]]}"#).unwrap();
        assert!(matches!(
            VerblunskySequence::from_spec(&bad),
            Err(Error::InvalidCoefficient { index: 1, .. })
        ));
        assert!(SequenceSpec::load(r#"{"kind":"nope"}"#).is_err());
    }

    fn seq(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)), len)
    }

    fn poly() -> impl Strategy<Value = ComplexPoly> {
        prop::collection::vec(
            (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b)),
            1..5,
        )
        .prop_map(ComplexPoly::new)
        .prop_filter("nonzero", |p| !p.is_zero())
    }

    proptest! {
        #[test]
        fn shift_poly_is_linear(x in seq(20), y in seq(20), p in poly()) {
            let sum: Vec<_> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = apply_shift_poly(&p, &sum).unwrap();
            let px = apply_shift_poly(&p, &x).unwrap();
            let py = apply_shift_poly(&p, &y).unwrap();
            for n in 0..20 {
                prop_assert!((lhs[n] - px[n] - py[n]).norm() < 1e-14);
            }
        }

        #[test]
        fn shift_poly_composes(x in seq(25), p in poly(), q in poly()) {
            let direct = apply_shift_poly(&(&p * &q), &x).unwrap();
            let nested = apply_shift_poly(&p, &apply_shift_poly(&q, &x).unwrap()).unwrap();
            for n in 0..25 {
                prop_assert!((direct[n] - nested[n]).norm() < 1e-13);
            }
        }
    }
}
