//! Functionals `α cos(φ/2) A0 + α sin(φ/2) A1 + CHSH`.

use serde::Serialize;

use crate::error::{finite, ChshError, Result};
use crate::model::{ProbabilityPoint, Realization};
use crate::polytope::Functional;
use crate::spectrum::{build_bell_operator, canonicalize_realization};

/// Family parameters, reduced by symmetry to `α ∈ [0, 2)`, `φ ∈ [0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubleTiltedParams {
    pub alpha: f64,
    pub phi: f64,
}

impl DoubleTiltedParams {
    /// Maps any `(α, φ)` to the reduced domain.  The coefficients
    /// `(α cos(φ/2), α sin(φ/2))` are replaced by their absolute values in
    /// decreasing order, which relabelings leave equivalent.
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        finite("alpha", alpha)?;
        finite("phi", phi)?;
        let c0 = alpha * (phi / 2.0).cos();
        let c1 = alpha * (phi / 2.0).sin();
        let (hi, lo) = (c0.abs().max(c1.abs()), c0.abs().min(c1.abs()));
        if alpha.abs() >= 2.0 {
            return Err(ChshError::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 2)",
            });
        }
        Ok(Self {
            alpha: hi.hypot(lo).min(alpha.abs()),
            phi: 2.0 * lo.atan2(hi),
        })
    }
}

/// Closed-form solution of the family at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoubleTiltedSolution {
    pub params: DoubleTiltedParams,
    pub beta_l: f64,
    /// Quantum value when admissible, the local bound otherwise.
    pub beta_q: f64,
    pub cos_b: f64,
    pub y1: f64,
    pub y2: f64,
    pub beta_q1: Option<f64>,
    pub beta_q2: Option<f64>,
    pub admissible: bool,
    /// Optimal measurement angles in the aligned frame.
    pub a_opt: Option<f64>,
    pub b_opt: Option<f64>,
    pub realization: Option<Realization>,
    pub point: Option<ProbabilityPoint>,
}

pub fn double_tilted_functional(p: &DoubleTiltedParams) -> Functional {
    let (s, c) = (p.phi / 2.0).sin_cos();
    Functional::new([p.alpha * c, p.alpha * s, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0]).expect("finite coefficients")
}

/// Closed-form eigenvalues `(λ1, λ2)` of the Bell operator; the spectrum is
/// `{±λ1, ±λ2}`.  Here `a` is half the aligned-frame angle of `A1`.
pub fn double_tilted_eigenvalues(alpha: f64, phi: f64, a: f64, b: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    let (sp, cp) = phi.sin_cos();
    let (c2a, c4a) = ((2.0 * a).cos(), (4.0 * a).cos());
    let (cb, c2b) = (b.cos(), (2.0 * b).cos());
    let s1 = 1.0 + 3.0 * a2 - c2b + a2 * cb * cp + 4.0 * a2 * c2a * sp + c4a * (-1.0 + a2 + c2b - a2 * cb * cp);
    let base = 4.0 + a2 + a2 * c2a * sp;
    let root = 2.0 * s1.max(0.0).sqrt();
    ((base + root).max(0.0).sqrt(), (base - root).max(0.0).sqrt())
}

/// Solves the family in closed form and, when admissible, builds the
/// optimal realisation from the Bell operator's top eigenvector.
pub fn double_tilted_solve(p: &DoubleTiltedParams) -> Result<DoubleTiltedSolution> {
    let p = DoubleTiltedParams::new(p.alpha, p.phi)?;
    let (alpha, phi) = (p.alpha, p.phi);
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let sp = phi.sin();
    let beta_l = alpha * (phi / 2.0).cos() + alpha * (phi / 2.0).sin() + 2.0;
    let cos_b = a2 * phi.cos() / 4.0;
    let k = a4 * (1.0 + (2.0 * phi).cos());
    let d = 4.0 - a2;
    let y1 = a2 * sp / d;
    let den2 = 32.0 - 16.0 * a2 + k;
    let y2 = a2 * sp * (96.0 - 16.0 * a2 - k) / (d * den2);
    let sqrt_pos = |v: f64| (v >= 0.0 && v.is_finite()).then(|| v.sqrt());
    let beta_q1 = sqrt_pos((32.0 - k) / d);
    let beta_q2 = sqrt_pos(d * (32.0 - k) / den2).map(|v| std::f64::consts::SQRT_2 * v);

    let interior = y2.is_finite() && y2.abs() < 1.0 && cos_b.abs() < 1.0;
    let admissible = interior && beta_q2.is_some_and(|q| q > beta_l);
    let mut sol = DoubleTiltedSolution {
        params: p,
        beta_l,
        beta_q: beta_l,
        cos_b,
        y1,
        y2,
        beta_q1,
        beta_q2,
        admissible,
        a_opt: None,
        b_opt: None,
        realization: None,
        point: None,
    };
    if admissible {
        let (a, b) = (y2.acos(), cos_b.acos());
        let f = double_tilted_functional(&p);
        let w = build_bell_operator(&f, a, b)?;
        let r = canonicalize_realization(&w.top_eigenpair().vector, a, b)?;
        sol.beta_q = beta_q2.unwrap();
        sol.a_opt = Some(a);
        sol.b_opt = Some(b);
        sol.point = Some(r.point());
        sol.realization = Some(r);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::maximize_quantum_value;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    #[test]
    fn chsh_limit() {
        let s = double_tilted_solve(&DoubleTiltedParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!(s.admissible);
        assert!((s.beta_q - 2.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(s.beta_l, 2.0);
    }

    #[test]
    fn tilted_values() {
        for i in 0..8 {
            let alpha = 0.25 * i as f64;
            let s = double_tilted_solve(&DoubleTiltedParams::new(alpha, 0.0).unwrap()).unwrap();
            assert!(s.admissible);
            assert!((s.beta_q - (8.0 + 2.0 * alpha * alpha).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_two_rejected() {
        assert!(DoubleTiltedParams::new(2.0, 0.3).is_err());
    }

    #[test]
    fn reduction() {
        let p = DoubleTiltedParams::new(1.0, PI + 0.4).unwrap();
        let q = DoubleTiltedParams::new(1.0, PI - 0.4).unwrap();
        assert!((p.phi - q.phi).abs() < 1e-12 && p.phi <= FRAC_PI_2);
        let r = DoubleTiltedParams::new(-1.2, 0.3).unwrap();
        assert!((r.alpha - 1.2).abs() < 1e-12 && (r.phi - 0.3).abs() < 1e-12);
    }

    #[test]
    fn realization_attains_value() {
        let p = DoubleTiltedParams::new(0.8, 0.6).unwrap();
        let s = double_tilted_solve(&p).unwrap();
        assert!(s.admissible);
        let f = double_tilted_functional(&p);
        assert!((f.value(&s.point.unwrap()) - s.beta_q).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_numeric_maximum() {
        for &(alpha, phi) in &[(0.5, 0.3), (1.0, 1.0), (1.5, 0.2), (0.3, 1.5)] {
            let p = DoubleTiltedParams::new(alpha, phi).unwrap();
            let s = double_tilted_solve(&p).unwrap();
            if !s.admissible {
                continue;
            }
            let m = maximize_quantum_value(&double_tilted_functional(&p), 64, 1e-12).unwrap();
            assert!((m.beta_max - s.beta_q).abs() < 1e-9, "{alpha} {phi}");
        }
    }

    proptest! {
        #[test]
        fn eigenvalue_formula_matches_numeric(
            alpha in 0.0f64..1.99, phi in 0.0f64..FRAC_PI_2,
            a in 0.0f64..FRAC_PI_2, b in 0.0f64..PI,
        ) {
            let p = DoubleTiltedParams { alpha, phi };
            let f = double_tilted_functional(&p);
            let s = build_bell_operator(&f, 2.0 * a, b).unwrap().spectrum();
            let (l1, l2) = double_tilted_eigenvalues(alpha, phi, a, b);
            prop_assert!((s[0] - l1).abs() < 1e-9);
            prop_assert!((s[1] - l2).abs() < 1e-6);
        }

        #[test]
        fn quantum_above_local(alpha in 0.0f64..1.99, phi in 0.0f64..FRAC_PI_2) {
            let s = double_tilted_solve(&DoubleTiltedParams::new(alpha, phi).unwrap()).unwrap();
            prop_assert!(s.beta_q >= s.beta_l);
            if s.admissible {
                let r = s.realization.unwrap();
                let f = double_tilted_functional(&s.params);
                prop_assert!((f.value(&r.point()) - s.beta_q).abs() < 1e-9);
            }
        }
    }
}
