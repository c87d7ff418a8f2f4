use serde::Serialize;

use super::operator::build_bell_operator;
use crate::error::{ChshError, Result};
use crate::polytope::Functional;

const ODD_TRACE_TOL: f64 = 1e-10;
const EVEN_TRACE_TOL: f64 = 1e-9;

/// Trace-moment check of a claimed spectrum `{±λ1, ±λ2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub m2: f64,
    pub m4: f64,
    /// `max(|Tr W|, |Tr W³|)`.
    pub odd_residual: f64,
    pub m2_residual: f64,
    pub m4_residual: f64,
    /// Eigenvalue magnitudes recovered from `m2` and `m4`.
    pub lambda1: f64,
    pub lambda2: f64,
    pub passed: bool,
}

/// Checks `Tr W = Tr W³ = 0`, `Tr W² = 2(λ1² + λ2²)` and
/// `Tr W⁴ = 2(λ1⁴ + λ2⁴)` for the aligned-frame operator.
///
/// The spectrum is symmetric about zero only when one party has no
/// marginal terms, so `F3 = F4 = 0` or `F1 = F2 = 0` is required.
pub fn moment_verify(f: &Functional, a: f64, b: f64, lambda1: f64, lambda2: f64) -> Result<MomentCheck> {
    let c = f.coeffs();
    if !(c[2] == 0.0 && c[3] == 0.0 || c[0] == 0.0 && c[1] == 0.0) {
        return Err(ChshError::Precondition(
            "moment check needs one party without marginal terms".into(),
        ));
    }
    let w = build_bell_operator(f, a, b)?.matrix;
    let w2 = w * w;
    let w3 = w2 * w;
    let w4 = w2 * w2;
    let (m1, m2, m3, m4) = (w.trace(), w2.trace(), w3.trace(), w4.trace());
    let (l1s, l2s) = (lambda1 * lambda1, lambda2 * lambda2);
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
    let m2_residual = rel(m2, 2.0 * (l1s + l2s));
    let m4_residual = rel(m4, 2.0 * (l1s * l1s + l2s * l2s));
    let odd_residual = m1.abs().max(m3.abs());
    let disc = (4.0 * m4 - m2 * m2).max(0.0).sqrt();
    Ok(MomentCheck {
        m2,
        m4,
        odd_residual,
        m2_residual,
        m4_residual,
        lambda1: ((m2 + disc).max(0.0)).sqrt() / 2.0,
        lambda2: ((m2 - disc).max(0.0)).sqrt() / 2.0,
        passed: odd_residual < ODD_TRACE_TOL && m2_residual < EVEN_TRACE_TOL && m4_residual < EVEN_TRACE_TOL,
    })
}
