//! Per-index terms of the cubic sum rule.
//!
//! Everything here is a function of the window `(α_k, α_{k-1}, α_{k-2}, α_{k-3})`
//! read through the extended accessor, so boundary rows pick up `α_{-1} = -1`
//! automatically.

use crate::seqkit::VerblunskySequence;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `(α_k, α_{k-1}, α_{k-2}, α_{k-3})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub a0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
}

impl Window {
    pub fn at(alpha: &VerblunskySequence, k: isize) -> Self {
        Self {
            a0: alpha.ext(k),
            a1: alpha.ext(k - 1),
            a2: alpha.ext(k - 2),
            a3: alpha.ext(k - 3),
        }
    }

    /// The window one index earlier; `a3` of the result is `earlier`.
    pub fn previous(&self, earlier: Complex64) -> Self {
        Self {
            a0: self.a1,
            a1: self.a2,
            a2: self.a3,
            a3: earlier,
        }
    }
}

fn n2(a: Complex64) -> f64 {
    a.norm_sqr()
}

/// `2 log(1 − z) + 2z + z²` for `z = |α|²`, using the tail series
/// `−2 Σ_{m≥3} z^m/m` where the direct form cancels badly.
pub fn l_term(a: Complex64) -> f64 {
    let z = n2(a);
    if z < 0.05 {
        let mut term = z * z * z;
        let mut acc = 0.0f64;
        let mut m = 3.0;
        while term > 1e-18 * acc.max(f64::MIN_POSITIVE) {
            acc += term / m;
            term *= z;
            m += 1.0;
        }
        -2.0 * acc
    } else {
        2.0 * (-z).ln_1p() + 2.0 * z + z * z
    }
}

pub fn e_term(w: &Window) -> f64 {
    -0.5 * (1.0 - n2(w.a1) - n2(w.a2)) * n2(w.a0 - w.a1 - w.a2 + w.a3)
}

pub fn g_term(w: &Window) -> f64 {
    -n2(w.a0 - 2.0 * w.a1 + w.a2).powi(2) / 32.0
}

pub fn j_term(w: &Window) -> Complex64 {
    let (a0, a1, a2) = (w.a0, w.a1, w.a2);
    let (c0, c1, c2) = (a0.conj(), a1.conj(), a2.conj());
    0.75 * a0 * c1 * c2
        + 1.25 * n2(a2) * c1
        + 1.125 * n2(a0) * c2
        + 0.5 * c1 * c1 * a2
        + c2 * n2(a1)
        + (23.0 / 16.0) * n2(a2) * c2
        - 1.25 * n2(a0) * c1
        - 0.75 * c0 * c1 * a2
        + (1.0 / 16.0) * a0 * c2 * c2
        + 0.25 * n2(a2) * c0
}

pub fn h_term(w: &Window) -> Complex64 {
    (w.a0 - w.a2) * j_term(w)
}

pub fn f_term(w: &Window) -> Complex64 {
    let (a0, a1, a2, a3) = (w.a0, w.a1, w.a2, w.a3);
    let (c1, c2, c3) = (a1.conj(), a2.conj(), a3.conj());
    -a0 * c3 * n2(a1) * n2(a2)
        - a0 * a0 * c1 * c2 * n2(a1)
        - a0 * a1 * c2 * c2 * n2(a1)
        - a0.powi(3) * c1.powi(3) / 3.0
}

/// `I_k`, depending on `(α_k, α_{k-1}, α_{k-2})`.
pub fn i_term(w: &Window) -> Complex64 {
    let (a0, a1, a2) = (w.a0, w.a1, w.a2);
    let (c1, c2) = (a1.conj(), a2.conj());
    let (m0, m1, m2) = (n2(a0), n2(a1), n2(a2));
    -1.5 * m0 - m1 - 0.5 * m2 + a0 * c2 + a1 * c2 + 0.5 * m0 * m2
        - (31.0 / 32.0) * m0 * m0
        - (31.0 / 32.0) * m1 * m1
        - 0.75 * a0 * a0 * c1 * c1
        + m0 * a0 * c1
        - m1 * a1 * c2
        - m1 * a0 * c2
        - m0 * a0 * c2
        - m0 * a1 * c2
        + 0.5 * m1 * m2
}

/// Summand `s_k` of the sum rule, so that `Z = ¼ Σ_k s_k`.
pub fn summand(w: &Window) -> f64 {
    let (a0, a1, a2, a3) = (w.a0, w.a1, w.a2, w.a3);
    let (c1, c2, c3) = (a1.conj(), a2.conj(), a3.conj());
    let r1 = 1.0 - n2(a1);
    let r2 = 1.0 - n2(a2);
    let v = a0 * c1 + 2.0 * a0 * c2 * r1 - a0 * a0 * c1 * c1 - a0 * c3 * r1 * r2
        + a0 * a0 * c1 * c2 * r1
        + a0 * a1 * c2 * c2 * r1
        - a0.powi(3) * c1.powi(3) / 3.0;
    2.0 * (-n2(a0)).ln_1p() + v.re
}

/// Contributions of index `k` to `w_0, w_1, w_2, w_3`.
pub fn moment_terms(w: &Window) -> [Complex64; 4] {
    let (a0, a1, a2, a3) = (w.a0, w.a1, w.a2, w.a3);
    let (c1, c2, c3) = (a1.conj(), a2.conj(), a3.conj());
    let r1 = 1.0 - n2(a1);
    let r2 = 1.0 - n2(a2);
    [
        Complex64::new((-n2(a0)).ln_1p(), 0.0),
        -a0 * c1,
        -a0 * c2 * r1 + 0.5 * a0 * a0 * c1 * c1,
        -a0 * c3 * r1 * r2 + a0 * a0 * c1 * c2 * r1 + a0 * a1 * c2 * c2 * r1
            - a0.powi(3) * c1.powi(3) / 3.0,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRow {
    pub k: isize,
    pub l: f64,
    pub e: f64,
    pub g: f64,
    pub h: Complex64,
    pub f: Complex64,
    pub i: Complex64,
    pub j: Complex64,
    /// Summand `s_k`.
    pub s: f64,
}

impl TermRow {
    pub fn at(alpha: &VerblunskySequence, k: isize) -> Self {
        Self::from_window(k, &Window::at(alpha, k))
    }

    pub fn from_window(k: isize, w: &Window) -> Self {
        let j = j_term(w);
        Self {
            k,
            l: l_term(w.a0),
            e: e_term(w),
            g: g_term(w),
            h: (w.a0 - w.a2) * j,
            f: f_term(w),
            i: i_term(w),
            j,
            s: summand(w),
        }
    }

    /// `Re(L + E + G + H + F)`.
    pub fn core_sum(&self) -> f64 {
        self.l + self.e + self.g + self.h.re + self.f.re
    }
}

/// Rows `k = 0, …, N + 2`; all families vanish identically from `k = N + 3` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermTable {
    pub horizon: usize,
    pub rows: Vec<TermRow>,
}

impl TermTable {
    pub const CSV_HEADER: &'static str = "k,L,E,G,H_re,H_im,F_re,F_im,I_re,I_im,J_re,J_im,s";

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.k,
                r.l,
                r.e,
                r.g,
                r.h.re,
                r.h.im,
                r.f.re,
                r.f.im,
                r.i.re,
                r.i.im,
                r.j.re,
                r.j.im,
                r.s
            )?;
        }
        Ok(())
    }
}

/// Number of rows carrying nonzero terms for horizon `n`.
pub fn table_rows(n: usize) -> usize {
    n + 3
}

pub fn term_rows(alpha: &VerblunskySequence) -> impl Iterator<Item = TermRow> + '_ {
    (0..table_rows(alpha.len()) as isize).map(move |k| TermRow::at(alpha, k))
}

pub fn term_table(alpha: &VerblunskySequence) -> TermTable {
    TermTable {
        horizon: alpha.len(),
        rows: term_rows(alpha).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub draws: usize,
    pub radius: f64,
    pub seed: u64,
    pub max_abs_residual: f64,
    /// Residual divided by `1 +` the largest individual term magnitude.
    pub max_rel_residual: f64,
    pub worst: Option<Window>,
}

/// Residual of `s_k − Re(L_k + E_k + G_k + H_k + F_k + I_k − I_{k-1})` for a
/// window treated as interior.
pub fn identity_residual(w: &Window) -> (f64, f64) {
    let row = TermRow::from_window(0, w);
    let i_prev = i_term(&w.previous(Complex64::default()));
    let rhs = row.core_sum() + (row.i - i_prev).re;
    let scale = [
        row.s.abs(),
        row.l.abs(),
        row.e.abs(),
        row.g.abs(),
        row.h.norm(),
        row.f.norm(),
        row.i.norm(),
        i_prev.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let abs = (row.s - rhs).abs();
    (abs, abs / (1.0 + scale))
}

/// Random windows with entries uniform in the disk of the given radius.
pub fn identity_check_interior(
    draws: usize,
    radius: f64,
    seed: u64,
) -> crate::Result<IdentityCheck> {
    if !(0.0..1.0).contains(&radius) {
        return Err(crate::Error::InvalidArgument(format!(
            "radius {radius} must lie in [0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample =
        || Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU);
    let mut out = IdentityCheck {
        draws,
        radius,
        seed,
        max_abs_residual: 0.0,
        max_rel_residual: 0.0,
        worst: None,
    };
    for _ in 0..draws {
        let w = Window {
            a0: sample(),
            a1: sample(),
            a2: sample(),
            a3: sample(),
        };
        let (abs, rel) = identity_residual(&w);
        out.max_abs_residual = out.max_abs_residual.max(abs);
        if rel >= out.max_rel_residual {
            out.max_rel_residual = rel;
            out.worst = Some(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden_window() -> Window {
        Window {
            a0: c(0.31, -0.22),
            a1: c(-0.47, 0.18),
            a2: c(0.05, 0.63),
            a3: c(-0.29, -0.41),
        }
    }

    // Frozen from an independent transcription of the formulas (plain
    // Python complex arithmetic); guards the long monomial lists.
    #[test]
    fn golden_evaluation() {
        let w = golden_window();
        let row = TermRow::from_window(0, &w);
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-14;
        assert!((row.l - GOLD_L).abs() < 1e-15, "{}", row.l);
        assert!((row.e - GOLD_E).abs() < 1e-15, "{}", row.e);
        assert!((row.g - GOLD_G).abs() < 1e-15, "{}", row.g);
        assert!(close(row.j, c(GOLD_J.0, GOLD_J.1)), "{}", row.j);
        assert!(close(row.h, c(GOLD_H.0, GOLD_H.1)), "{}", row.h);
        assert!(close(row.f, c(GOLD_F.0, GOLD_F.1)), "{}", row.f);
        assert!(close(row.i, c(GOLD_I.0, GOLD_I.1)), "{}", row.i);
        assert!((row.s - GOLD_S).abs() < 1e-14, "{}", row.s);
    }

    const GOLD_L: f64 = -0.0022581212997776975;
    const GOLD_E: f64 = -0.39369928000000004;
    const GOLD_G: f64 = -0.08951738281250002;
    const GOLD_J: (f64, f64) = (-0.1820945, -0.445834125);
    const GOLD_H: (f64, f64) = (-0.42630357625000004, 0.03886345249999999);
    const GOLD_F: (f64, f64) = (-0.019734676383333333, -0.014899005388333327);
    const GOLD_I: (f64, f64) = (-0.7435145818750001, 0.07960597999999998);
    const GOLD_S: f64 = -0.6486793576831111;

    #[test]
    fn h_is_difference_times_j() {
        let w = golden_window();
        assert_eq!(h_term(&w), (w.a0 - w.a2) * j_term(&w));
    }

    #[test]
    fn zero_window_identity() {
        let w = Window {
            a0: c(0.0, 0.0),
            a1: c(0.0, 0.0),
            a2: c(0.0, 0.0),
            a3: c(0.0, 0.0),
        };
        assert_eq!(identity_residual(&w).0, 0.0);
    }

    #[test]
    fn constant_window_kills_e() {
        let a = c(0.4, -0.3);
        let w = Window {
            a0: a,
            a1: a,
            a2: a,
            a3: a,
        };
        assert_eq!(e_term(&w), 0.0);
        assert!(identity_residual(&w).1 <= 1e-12);
    }

    #[test]
    fn interior_identity_random() {
        let check = identity_check_interior(10_000, 0.9, 1).unwrap();
        assert!(check.max_rel_residual <= 1e-12, "{check:?}");
        assert!(identity_check_interior(1, 1.0, 1).is_err());
    }

    #[test]
    fn g_nonpositive_and_e_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let mut s =
                || Complex64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * TAU);
            let w = Window {
                a0: s(),
                a1: s(),
                a2: s(),
                a3: s(),
            };
            assert!(g_term(&w) <= 0.0);
            if 1.0 - w.a1.norm_sqr() - w.a2.norm_sqr() >= 0.0 {
                assert!(e_term(&w) <= 0.0);
            }
        }
    }

    #[test]
    fn l_term_branches_agree() {
        for &r in &[0.2236, 0.22361, 0.1, 0.01] {
            let z: f64 = r * r;
            let direct = 2.0 * (-z).ln_1p() + 2.0 * z + z * z;
            let l = l_term(c(r, 0.0));
            assert!(
                (l - direct).abs() <= 1e-15 + 1e-9 * direct.abs(),
                "{r}: {l} {direct}"
            );
        }
        assert!((l_term(c(0.5, 0.0)) - (2.0 * 0.75f64.ln() + 0.5 + 0.0625)).abs() < 1e-16);
    }

    #[test]
    fn two_periodic_second_difference() {
        let a = 0.3;
        let alpha = VerblunskySequence::from_real(&[a, 0.0, a, 0.0, a, 0.0, a, 0.0]).unwrap();
        for k in 2..8 {
            let g = TermRow::at(&alpha, k).g;
            assert!((g + (2.0 * a).powi(4) / 32.0).abs() < 1e-16, "k={k}: {g}");
        }
    }

    #[test]
    fn constant_sequence_e_vanishes() {
        let alpha = VerblunskySequence::from_real(&[0.1; 10]).unwrap();
        for k in 3..10 {
            assert_eq!(TermRow::at(&alpha, k).e, 0.0);
        }
    }

    #[test]
    fn table_extent() {
        let alpha = VerblunskySequence::from_real(&[0.2, -0.1, 0.3]).unwrap();
        let t = term_table(&alpha);
        assert_eq!(t.rows.len(), 6);
        let beyond = TermRow::at(&alpha, 6);
        assert_eq!(beyond.core_sum(), 0.0);
        assert_eq!(beyond.i, Complex64::default());
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 7);
    }
}
