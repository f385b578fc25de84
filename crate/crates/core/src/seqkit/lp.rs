//! Numerical evidence for ℓᵖ membership from partial sums `Σ_{k<N} |x_k|^p`.
//!
//! Two models are fitted to the partial sums over the top half of the
//! horizons: `c + a·log N` and `c + a·N^s` with `|s| ≥ MIN_POWER_EXPONENT`.
//! A negative fitted `s` means the partial sums approach `c` (convergent),
//! a positive one means power-law growth.

use crate::compensated::NeumaierSum;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dyadic increment `S(N) − S(N/2)` below this fraction of `S(N)` counts as converged.
pub const CONVERGED_INCREMENT: f64 = 1e-6;
/// Residuals closer than this relative margin give no verdict.
pub const INCONCLUSIVE_MARGIN: f64 = 0.10;
/// Smallest |s| in the power model; below it `N^s` is indistinguishable from `log N`.
pub const MIN_POWER_EXPONENT: f64 = 0.05;
const MAX_POWER_EXPONENT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    LogDivergent,
    PowerDivergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum FitModel {
    Log,
    Power { exponent: f64 },
}

/// `intercept + slope·log N`, or `intercept + slope·N^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    #[serde(flatten)]
    pub model: FitModel,
    pub intercept: f64,
    pub slope: f64,
    /// RMS residual over the fitted horizons.
    pub residual: f64,
}

impl Fit {
    pub fn eval(&self, n: f64) -> f64 {
        match self.model {
            FitModel::Log => self.intercept + self.slope * n.ln(),
            FitModel::Power { exponent } => self.intercept + self.slope * n.powf(exponent),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpDiagnostics {
    pub p: f64,
    pub partial_norms: Vec<(usize, f64)>,
    pub verdict: Verdict,
    /// The model with the smaller residual.
    pub fit: Fit,
    pub log_fit: Fit,
    pub power_fit: Fit,
    /// `S(N_max) − S(⌊N_max/2⌋)`.
    pub last_increment: f64,
}

/// Horizons `N, N/2, N/4, …` (at most `count`, none below 2), increasing.
pub fn dyadic_horizons(n_max: usize, count: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = n_max;
    while n >= 2 && out.len() < count {
        out.push(n);
        n /= 2;
    }
    out.reverse();
    out
}

pub fn lp_diagnose(x: &[Complex64], p: f64, horizons: &[usize]) -> Result<LpDiagnostics> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponent p = {p} must be >= 1"
        )));
    }
    if horizons.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "lp_diagnose needs at least 3 horizons, got {}",
            horizons.len()
        )));
    }
    if horizons[0] == 0 || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "horizons must be positive and strictly increasing".into(),
        ));
    }
    let n_max = *horizons.last().unwrap();
    if n_max > x.len() {
        return Err(Error::InvalidArgument(format!(
            "horizon {n_max} exceeds sequence length {}",
            x.len()
        )));
    }

    let half = n_max / 2;
    let mut acc = NeumaierSum::new();
    let mut partial_norms = Vec::with_capacity(horizons.len());
    let mut at_half = 0.0;
    let mut next = horizons.iter().peekable();
    for (k, v) in x[..n_max].iter().enumerate() {
        if k == half {
            at_half = acc.value();
        }
        acc.add(v.norm().powf(p));
        while next.peek().is_some_and(|&&h| h == k + 1) {
            partial_norms.push((k + 1, acc.value()));
            next.next();
        }
    }
    let total = acc.value();
    let last_increment = total - at_half;

    let start = (horizons.len() / 2).min(horizons.len() - 3);
    let ns: Vec<f64> = partial_norms[start..]
        .iter()
        .map(|&(n, _)| n as f64)
        .collect();
    let ss: Vec<f64> = partial_norms[start..].iter().map(|&(_, s)| s).collect();
    let log_fit = fit_log(&ns, &ss);
    let power_fit = fit_power(&ns, &ss);

    let (fit, verdict) = decide(total, last_increment, log_fit, power_fit);
    Ok(LpDiagnostics {
        p,
        partial_norms,
        verdict,
        fit,
        log_fit,
        power_fit,
        last_increment,
    })
}

fn decide(total: f64, increment: f64, log_fit: Fit, power_fit: Fit) -> (Fit, Verdict) {
    let best = if power_fit.residual < log_fit.residual {
        power_fit
    } else {
        log_fit
    };
    if increment <= CONVERGED_INCREMENT * total {
        return (best, Verdict::Converged);
    }
    let (lo, hi) = if log_fit.residual < power_fit.residual {
        (log_fit.residual, power_fit.residual)
    } else {
        (power_fit.residual, log_fit.residual)
    };
    if hi - lo < INCONCLUSIVE_MARGIN * hi {
        return (best, Verdict::Inconclusive);
    }
    let verdict = match best.model {
        FitModel::Log if best.slope > 0.0 => Verdict::LogDivergent,
        FitModel::Log => Verdict::Inconclusive,
        FitModel::Power { exponent } if exponent < 0.0 => Verdict::Converged,
        FitModel::Power { .. } if best.slope > 0.0 => Verdict::PowerDivergent,
        FitModel::Power { .. } => Verdict::Inconclusive,
    };
    (best, verdict)
}

/// Least squares for `y = c + a·u`; returns `(c, a, rms residual)`.
fn linear_fit(u: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = u.len() as f64;
    let ub = u.iter().sum::<f64>() / n;
    let yb = y.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|v| (v - ub).powi(2)).sum();
    let suy: f64 = u.iter().zip(y).map(|(a, b)| (a - ub) * (b - yb)).sum();
    let a = if suu > 0.0 { suy / suu } else { 0.0 };
    let c = yb - a * ub;
    let rss: f64 = u
        .iter()
        .zip(y)
        .map(|(ui, yi)| (yi - c - a * ui).powi(2))
        .sum();
    (c, a, (rss / n).sqrt())
}

fn fit_log(ns: &[f64], ss: &[f64]) -> Fit {
    let u: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (intercept, slope, residual) = linear_fit(&u, ss);
    Fit {
        model: FitModel::Log,
        intercept,
        slope,
        residual,
    }
}

fn fit_power(ns: &[f64], ss: &[f64]) -> Fit {
    let n_ref = *ns.last().unwrap();
    let eval = |s: f64| {
        let u: Vec<f64> = ns.iter().map(|n| (n / n_ref).powf(s)).collect();
        linear_fit(&u, ss)
    };
    let mut grid: Vec<f64> = Vec::new();
    let steps = 200;
    let ratio = (MAX_POWER_EXPONENT / MIN_POWER_EXPONENT).powf(1.0 / steps as f64);
    let mut v = MIN_POWER_EXPONENT;
    for _ in 0..=steps {
        grid.push(-v);
        grid.push(v);
        v *= ratio;
    }
    grid.sort_by(f64::total_cmp);

    let (mut best_i, mut best_r) = (0, f64::INFINITY);
    for (i, &s) in grid.iter().enumerate() {
        let r = eval(s).2;
        if r < best_r {
            best_i = i;
            best_r = r;
        }
    }
    // golden-section refinement between the neighbouring grid points,
    // staying on one side of zero
    let s0 = grid[best_i];
    let mut lo = grid.get(best_i.wrapping_sub(1)).copied().unwrap_or(s0);
    let mut hi = grid.get(best_i + 1).copied().unwrap_or(s0);
    if s0 > 0.0 {
        lo = lo.max(MIN_POWER_EXPONENT);
    } else {
        hi = hi.min(-MIN_POWER_EXPONENT);
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..60 {
        let m1 = b - g * (b - a);
        let m2 = a + g * (b - a);
        if eval(m1).2 < eval(m2).2 {
            b = m2;
        } else {
            a = m1;
        }
    }
    let mid = 0.5 * (a + b);
    let s = if eval(mid).2 < best_r { mid } else { s0 };
    let (intercept, scaled_slope, residual) = eval(s);
    Fit {
        model: FitModel::Power { exponent: s },
        intercept,
        slope: scaled_slope * n_ref.powf(-s),
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_seq(n: usize, f: impl Fn(usize) -> f64) -> Vec<Complex64> {
        (0..n).map(|k| Complex64::new(f(k), 0.0)).collect()
    }

    fn horizons() -> Vec<usize> {
        dyadic_horizons(1 << 18, 15)
    }

    #[test]
    fn harmonic_is_log_divergent() {
        let x = real_seq(1 << 18, |k| 1.0 / (k + 1) as f64);
        let d = lp_diagnose(&x, 1.0, &horizons()).unwrap();
        assert_eq!(d.verdict, Verdict::LogDivergent);
        assert_eq!(d.fit.model, FitModel::Log);
        assert!((d.fit.slope - 1.0).abs() < 0.05, "{}", d.fit.slope);
    }

    #[test]
    fn basel_converges() {
        let x = real_seq(1 << 18, |k| 1.0 / (k + 1) as f64);
        let d = lp_diagnose(&x, 2.0, &horizons()).unwrap();
        assert_eq!(d.verdict, Verdict::Converged);
        let s = d.partial_norms.last().unwrap().1;
        assert!((s - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-5);
    }

    #[test]
    fn constant_is_power_divergent() {
        let x = real_seq(1 << 16, |_| 0.5);
        let d = lp_diagnose(&x, 1.0, &dyadic_horizons(1 << 16, 12)).unwrap();
        assert_eq!(d.verdict, Verdict::PowerDivergent);
        match d.fit.model {
            FitModel::Power { exponent } => assert!((exponent - 1.0).abs() < 1e-6),
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn zero_sequence_converges() {
        let x = vec![Complex64::default(); 64];
        let d = lp_diagnose(&x, 2.0, &dyadic_horizons(64, 10)).unwrap();
        assert_eq!(d.verdict, Verdict::Converged);
    }

    #[test]
    fn partial_norms_nondecreasing() {
        let x = real_seq(5000, |k| ((k as f64) * 0.37).sin());
        let d = lp_diagnose(&x, 3.0, &dyadic_horizons(5000, 10)).unwrap();
        assert!(d.partial_norms.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn argument_errors() {
        let x = real_seq(100, |_| 0.1);
        assert!(lp_diagnose(&x, 2.0, &[10, 20]).is_err());
        assert!(lp_diagnose(&x, 0.5, &[10, 20, 40]).is_err());
        assert!(lp_diagnose(&x, 2.0, &[10, 40, 20]).is_err());
        assert!(lp_diagnose(&x, 2.0, &[10, 20, 400]).is_err());
    }

    #[test]
    fn dyadic_horizons_shape() {
        assert_eq!(dyadic_horizons(64, 20), vec![2, 4, 8, 16, 32, 64]);
        assert_eq!(dyadic_horizons(1000, 3), vec![250, 500, 1000]);
    }

    #[test]
    fn power_law_grid() {
        // x_k = (k+1)^{-q}: convergent iff q·p > 1
        let n = 1 << 18;
        let h = horizons();
        for &q in &[0.5, 1.0, 2.0] {
            let x = real_seq(n, |k| ((k + 1) as f64).powf(-q));
            for &p in &[1.0, 2.0, 3.0, 4.0] {
                let d = lp_diagnose(&x, p, &h).unwrap();
                let qp: f64 = q * p;
                let expected = if (qp - 1.0).abs() < 1e-12 {
                    Verdict::LogDivergent
                } else if qp > 1.0 {
                    Verdict::Converged
                } else {
                    Verdict::PowerDivergent
                };
                assert_eq!(d.verdict, expected, "q={q} p={p} {:?}", d.fit);
            }
        }
    }
}
