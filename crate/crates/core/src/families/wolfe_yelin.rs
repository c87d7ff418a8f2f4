//! Functionals `α0 (A0 + A1) + α1 B0 + CHSH`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{finite, ChshError, Result};
use crate::model::{ProbabilityPoint, Realization};
use crate::polytope::Functional;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WolfeYelinParams {
    pub alpha0: f64,
    pub alpha1: f64,
}

impl WolfeYelinParams {
    /// Requires `α0 ∈ (-1, 1)` and `α1 ∈ [0, 2]`.
    pub fn new(alpha0: f64, alpha1: f64) -> Result<Self> {
        finite("alpha0", alpha0)?;
        finite("alpha1", alpha1)?;
        if alpha0.abs() >= 1.0 {
            return Err(ChshError::OutOfRange {
                name: "alpha0",
                value: alpha0,
                range: "(-1, 1)",
            });
        }
        if !(0.0..=2.0).contains(&alpha1) {
            return Err(ChshError::OutOfRange {
                name: "alpha1",
                value: alpha1,
                range: "[0, 2]",
            });
        }
        Ok(Self { alpha0, alpha1 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WolfeYelinSolution {
    pub params: WolfeYelinParams,
    pub beta_l: f64,
    /// `λ+` when admissible, the local bound otherwise.
    pub beta_q: f64,
    pub discriminant: f64,
    pub x_plus: f64,
    pub x_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub admissible: bool,
    /// `arccos(x+)`: Alice measures at `±a_half`, Bob at `0` and `π/2`.
    pub a_half: Option<f64>,
    pub cot_half_theta: Option<f64>,
    pub realization: Option<Realization>,
    pub point: Option<ProbabilityPoint>,
}

pub fn wolfe_yelin_functional(p: &WolfeYelinParams) -> Functional {
    Functional::new([p.alpha0, p.alpha0, p.alpha1, 0.0, 1.0, 1.0, 1.0, -1.0]).expect("finite coefficients")
}

/// Top eigenvalue of the Bell operator at `b = π/2` as a function of the
/// symmetric-frame angle `a`, valid when `2 cos(a/2) ≥ α1`.
pub fn wolfe_yelin_eigenvalue(alpha0: f64, alpha1: f64, a: f64) -> f64 {
    let c = (a / 2.0).cos();
    let inner = 2.0 + alpha1 * alpha1 + 2.0 * alpha0 * alpha0 + 4.0 * alpha0 * alpha1 * c
        - 2.0 * a.cos() * (1.0 - alpha0 * alpha0);
    2.0 * c + inner.max(0.0).sqrt()
}

/// `cot(θ/2)` of the optimal state, if defined and positive.
pub fn wolfe_yelin_cot_half_theta(p: &WolfeYelinParams) -> Option<f64> {
    let (a0, a1) = (p.alpha0, p.alpha1);
    let a02 = a0 * a0;
    let r = 4.0 + a1 * a1 - 4.0 * a02;
    let q = 2.0 - a02;
    let num = a1 * q.sqrt() + r.sqrt() * (1.0 + a0 - a02);
    let den2 = -2.0 * a0 * a1 * (q * r).sqrt() + a1 * a1 * (-1.0 - 2.0 * a02 + a02 * a02)
        - 4.0 * (-1.0 + 4.0 * a02 - 4.0 * a02 * a02 + a02 * a02 * a02);
    let cot = num / den2.sqrt();
    (den2 > 0.0 && cot.is_finite() && cot > 0.0).then_some(cot)
}

/// Closed-form solution.  Admissible when `α1/2 < x+ < 1` and `λ+`
/// exceeds the local bound.
pub fn wolfe_yelin_solve(p: &WolfeYelinParams) -> Result<WolfeYelinSolution> {
    let p = WolfeYelinParams::new(p.alpha0, p.alpha1)?;
    let (a0, a1) = (p.alpha0, p.alpha1);
    let a02 = a0 * a0;
    let beta_l = (2.0 * a0 + a1 + 2.0).max(-2.0 * a0 - a1 + 2.0).max(a1 + 2.0);
    let q = 2.0 - a02;
    let r = a1 * a1 + 4.0 - 4.0 * a02;
    let discriminant = 16.0 * q * r;
    let root = (r / q).sqrt();
    let x_plus = (a0 * a1 + root) / (2.0 * (1.0 - a02));
    let x_minus = (a0 * a1 - root) / (2.0 * (1.0 - a02));
    let lambda_plus = (a0 * a1 + (r * q).sqrt()) / (1.0 - a02);
    let lambda_minus = (a0 * a1 - a02 * root) / (1.0 - a02);
    let stationary = a1 / 2.0 < x_plus && x_plus < 1.0;
    let admissible = stationary && beta_l < lambda_plus;
    let mut sol = WolfeYelinSolution {
        params: p,
        beta_l,
        beta_q: beta_l,
        discriminant,
        x_plus,
        x_minus,
        lambda_plus,
        lambda_minus,
        admissible,
        a_half: None,
        cot_half_theta: None,
        realization: None,
        point: None,
    };
    if stationary {
        sol.a_half = Some(x_plus.acos());
        sol.cot_half_theta = wolfe_yelin_cot_half_theta(&p);
    }
    if admissible {
        let r = wolfe_yelin_extended_realization(&p)?;
        sol.beta_q = lambda_plus;
        sol.point = Some(r.point());
        sol.realization = Some(r);
    }
    Ok(sol)
}

/// The closed-form optimal realisation, evaluated wherever the stationary
/// point `α1/2 < x+ < 1` exists, including parameters where it does not
/// beat the local bound.
pub fn wolfe_yelin_extended_realization(p: &WolfeYelinParams) -> Result<Realization> {
    let (a0, a1) = (p.alpha0, p.alpha1);
    let root = ((a1 * a1 + 4.0 - 4.0 * a0 * a0) / (2.0 - a0 * a0)).sqrt();
    let x_plus = (a0 * a1 + root) / (2.0 * (1.0 - a0 * a0));
    if !(a1 / 2.0 < x_plus && x_plus < 1.0) {
        return Err(ChshError::Precondition(format!(
            "no interior stationary point: x+ = {x_plus}"
        )));
    }
    let cot = wolfe_yelin_cot_half_theta(p).ok_or(ChshError::UndefinedStateAngle { alpha0: a0, alpha1: a1 })?;
    let theta = 2.0 * (1.0 / cot).atan();
    let a = x_plus.acos();
    Realization::with_state_angle(theta, [a, -a, 0.0, FRAC_PI_2])
}

pub fn wolfe_yelin_extended_point(p: &WolfeYelinParams) -> Result<ProbabilityPoint> {
    Ok(wolfe_yelin_extended_realization(p)?.point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{build_bell_operator_in, maximize_quantum_value, Frame};
    use proptest::prelude::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn chsh_limit() {
        let s = wolfe_yelin_solve(&WolfeYelinParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!(s.admissible);
        assert!((s.beta_q - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn no_advantage_at_edge() {
        let s = wolfe_yelin_solve(&WolfeYelinParams::new(0.0, 2.0).unwrap()).unwrap();
        assert!(!s.admissible);
        assert_eq!(s.beta_q, s.beta_l);
    }

    #[test]
    fn range_checks() {
        assert!(WolfeYelinParams::new(1.0, 0.5).is_err());
        assert!(WolfeYelinParams::new(0.1, 2.5).is_err());
        assert!(WolfeYelinParams::new(0.1, -0.1).is_err());
    }

    #[test]
    fn point_attains_lambda_plus() {
        let p = WolfeYelinParams::new(0.3, 0.5).unwrap();
        let s = wolfe_yelin_solve(&p).unwrap();
        assert!(s.admissible);
        let v = wolfe_yelin_functional(&p).value(&s.point.unwrap());
        assert!((v - s.lambda_plus).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_numeric_maximum() {
        for &(a0, a1) in &[(0.3, 0.5), (-0.4, 0.2), (0.6, 0.1), (0.1, 1.0)] {
            let p = WolfeYelinParams::new(a0, a1).unwrap();
            let s = wolfe_yelin_solve(&p).unwrap();
            if !s.admissible {
                continue;
            }
            let m = maximize_quantum_value(&wolfe_yelin_functional(&p), 64, 1e-12).unwrap();
            assert!(
                (m.beta_max - s.beta_q).abs() < 1e-9,
                "{a0} {a1}: {} vs {}",
                m.beta_max,
                s.beta_q
            );
        }
    }

    proptest! {
        #[test]
        fn discriminant_positive(a0 in -0.999f64..0.999, a1 in 0.0f64..=2.0) {
            let s = wolfe_yelin_solve(&WolfeYelinParams::new(a0, a1).unwrap()).unwrap();
            prop_assert!(s.discriminant > 0.0);
            prop_assert!(s.beta_q >= s.beta_l);
        }

        #[test]
        fn eigenvalue_formula_matches_numeric(a0 in -0.99f64..0.99, a1 in 0.0f64..2.0, a in 0.0f64..PI) {
            prop_assume!(2.0 * (a / 2.0).cos() >= a1);
            let f = wolfe_yelin_functional(&WolfeYelinParams::new(a0, a1).unwrap());
            let w = build_bell_operator_in(&f, a, FRAC_PI_2, Frame::Symmetric).unwrap();
            prop_assert!((w.spectrum()[0] - wolfe_yelin_eigenvalue(a0, a1, a)).abs() < 1e-9);
        }

        #[test]
        fn extended_point_attains_lambda_plus(a0 in -0.99f64..0.99, a1 in 0.0f64..2.0) {
            let p = WolfeYelinParams::new(a0, a1).unwrap();
            let s = wolfe_yelin_solve(&p).unwrap();
            if let Ok(pt) = wolfe_yelin_extended_point(&p) {
                let v = wolfe_yelin_functional(&p).value(&pt);
                prop_assert!((v - s.lambda_plus).abs() < 1e-9);
            }
        }
    }
}
