//! Closed-form sums over Verblunsky coefficients: the moments `w_0..w_3`
//! of `log w`, the cubic sum rule `Z`, and its regrouping into the term
//! families `L, E, G, H, F, I, J`.

mod boundary;
mod terms;

pub use boundary::{
    boundary_reconcile, candidate_conventions, family_bounds, z_from_families, BoundaryConvention,
    CandidateResult, FamilyBoundsReport, FamilyL1, ReconcileReport, L_BOUND_CONSTANT,
};
pub use terms::{
    e_term, f_term, g_term, h_term, i_term, identity_check_interior, identity_residual, j_term,
    l_term, moment_terms, summand, table_rows, term_rows, term_table, IdentityCheck, TermRow,
    TermTable, Window,
};

use crate::compensated::{ComplexSum, NeumaierSum};
use crate::seqkit::VerblunskySequence;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSums {
    pub w0: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
    pub w3: Complex64,
}

impl MomentSums {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.w0, self.w1, self.w2, self.w3]
    }

    /// `¼ Re(2w_0 − w_1 − 2w_2 + w_3)`.
    pub fn cubic_z(&self) -> f64 {
        0.25 * (2.0 * self.w0 - self.w1 - 2.0 * self.w2 + self.w3).re
    }
}

/// Per-index contributions `k = 0..N` to the four moments.
pub fn moment_rows(alpha: &VerblunskySequence) -> Vec<[Complex64; 4]> {
    (0..alpha.len() as isize)
        .map(|k| moment_terms(&Window::at(alpha, k)))
        .collect()
}

/// Every summand carries a factor `α_k`, so `k ≥ N` contributes nothing.
pub fn moments_sum(alpha: &VerblunskySequence) -> MomentSums {
    let mut acc = [ComplexSum::new(); 4];
    for k in 0..alpha.len() as isize {
        for (a, t) in acc.iter_mut().zip(moment_terms(&Window::at(alpha, k))) {
            a.add(t);
        }
    }
    MomentSums {
        w0: acc[0].value(),
        w1: acc[1].value(),
        w2: acc[2].value(),
        w3: acc[3].value(),
    }
}

/// `Z = ¼ Σ_{k≥0} s_k`.
pub fn z_sum(alpha: &VerblunskySequence) -> f64 {
    let acc: NeumaierSum = (0..alpha.len() as isize)
        .map(|k| summand(&Window::at(alpha, k)))
        .sum();
    0.25 * acc.value()
}

/// `¼ Σ_{k<N} s_k` at each checkpoint `N`, which is `Z` of the truncation
/// `α^{(N)}`. Checkpoints beyond the horizon are clamped to it.
pub fn z_partial_sums(alpha: &VerblunskySequence, checkpoints: &[usize]) -> Vec<(usize, f64)> {
    let mut cps: Vec<usize> = checkpoints.iter().map(|&c| c.min(alpha.len())).collect();
    cps.sort_unstable();
    cps.dedup();
    let mut out = Vec::with_capacity(cps.len());
    let mut acc = NeumaierSum::new();
    let mut next = cps.iter().peekable();
    while next.peek() == Some(&&0) {
        out.push((0, 0.0));
        next.next();
    }
    for k in 0..alpha.len() {
        acc.add(summand(&Window::at(alpha, k as isize)));
        while next.peek() == Some(&&(k + 1)) {
            out.push((k + 1, 0.25 * acc.value()));
            next.next();
        }
    }
    out
}
