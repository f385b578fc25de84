//! Higher-order Szegő functionals of measures on the unit circle, computed
//! from Verblunsky coefficients and cross-checked against direct quadrature
//! of Bernstein–Szegő weights.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compensated;
pub mod error;
pub mod experiments;
pub mod opuc;
pub mod polyring;
pub mod seqkit;
pub mod sums;

pub use error::{Error, Result};
