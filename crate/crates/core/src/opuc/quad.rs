//! Uniform trapezoidal rule on `[0, 2π)` with node doubling.
//!
//! For analytic periodic integrands the rule converges geometrically, so the
//! change between successive doublings is used as the error estimate.

use crate::compensated::ComplexSum;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub tol: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            min_nodes: 256,
            max_nodes: 1 << 20,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const K: usize> {
    /// `∫ f dθ/2π` per component.
    pub values: [Complex64; K],
    pub nodes: usize,
    /// Largest componentwise change at the last doubling.
    pub change: f64,
}

/// Mean value `∫_0^{2π} f(θ) dθ/2π` of a vector-valued periodic integrand.
pub fn periodic_mean<const K: usize, F>(f: F, cfg: &QuadConfig) -> Result<QuadResult<K>>
where
    F: Fn(f64) -> [Complex64; K],
{
    if !(cfg.tol > 0.0) || cfg.min_nodes == 0 || cfg.max_nodes < cfg.min_nodes {
        return Err(Error::InvalidArgument(format!(
            "bad quadrature configuration {cfg:?}"
        )));
    }
    let mut sums = [ComplexSum::new(); K];
    let mut nodes = cfg.min_nodes;
    let h = TAU / nodes as f64;
    for j in 0..nodes {
        let v = f(j as f64 * h);
        for (s, x) in sums.iter_mut().zip(v) {
            s.add(x);
        }
    }
    let mut prev = means(&sums, nodes);
    loop {
        if nodes * 2 > cfg.max_nodes {
            return Err(Error::Accuracy {
                tolerance: cfg.tol,
                achieved: f64::NAN,
                nodes,
            });
        }
        let h = TAU / (2 * nodes) as f64;
        for j in 0..nodes {
            let v = f((2 * j + 1) as f64 * h);
            for (s, x) in sums.iter_mut().zip(v) {
                s.add(x);
            }
        }
        nodes *= 2;
        let cur = means(&sums, nodes);
        let change = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < cfg.tol {
            return Ok(QuadResult {
                values: cur,
                nodes,
                change,
            });
        }
        if nodes * 2 > cfg.max_nodes {
            return Err(Error::Accuracy {
                tolerance: cfg.tol,
                achieved: change,
                nodes,
            });
        }
        prev = cur;
    }
}

fn means<const K: usize>(sums: &[ComplexSum; K], nodes: usize) -> [Complex64; K] {
    let mut out = [Complex64::default(); K];
    for (o, s) in out.iter_mut().zip(sums) {
        *o = s.value() / nodes as f64;
    }
    out
}
