//! Parameter sweeps over the two families and randomized cross-checks of the
//! extremality criteria.
//!
//! Every sweep returns its rows in a fixed order (first axis outer), however
//! the cells were scheduled.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{finite, ChshError, Result};
use crate::expose::{build_expose_lp, certify_with, solve_expose_lp, LpStatus, Verdict};
use crate::extremality::{extremality_report, Method};
use crate::families::{
    double_tilted_solve, wolfe_yelin_extended_realization, wolfe_yelin_solve, DoubleTiltedParams, WolfeYelinParams,
};
use crate::model::Realization;
use crate::sampling::seeded_realization;
use crate::spectrum::MaximizeOptions;

/// Evenly spaced values from `min` to `max`, both included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        finite("min", min)?;
        finite("max", max)?;
        if steps < 2 {
            return Err(ChshError::OutOfRange {
                name: "steps",
                value: steps as f64,
                range: "[2, inf)",
            });
        }
        if min > max {
            return Err(ChshError::Precondition(format!("empty range [{min}, {max}]")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }

    fn check_within(&self, name: &'static str, lo: f64, hi: f64, hi_open: bool, range: &'static str) -> Result<()> {
        let bad = |v: f64| v < lo || v > hi || (hi_open && v >= hi);
        for v in [self.min, self.max] {
            if bad(v) {
                return Err(ChshError::OutOfRange { name, value: v, range });
            }
        }
        Ok(())
    }
}

fn grid<T: Send>(first: &Axis, second: &Axis, cell: impl Fn(f64, f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..first.steps * second.steps)
        .into_par_iter()
        .map(|k| cell(first.value(k / second.steps), second.value(k % second.steps)))
        .collect()
}

fn both_extremal(r: &Realization) -> (bool, bool) {
    let report = extremality_report(r, Method::Both);
    (
        report.stlm.is_some_and(|v| v.extremal),
        report.threshold.is_some_and(|v| v.extremal),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubleTiltedRow {
    pub alpha: f64,
    pub phi: f64,
    pub beta_l: f64,
    pub beta_q: f64,
    pub admissible: bool,
    pub c1_extremal: bool,
    pub c2_extremal: bool,
}

pub fn double_tilted_cell(alpha: f64, phi: f64) -> Result<DoubleTiltedRow> {
    let sol = double_tilted_solve(&DoubleTiltedParams::new(alpha, phi)?)?;
    let (c1, c2) = sol.realization.as_ref().map_or((false, false), both_extremal);
    Ok(DoubleTiltedRow {
        alpha,
        phi,
        beta_l: sol.beta_l,
        beta_q: sol.beta_q,
        admissible: sol.admissible,
        c1_extremal: c1,
        c2_extremal: c2,
    })
}

/// Sweep over `α ∈ [0, 2)`, `φ ∈ [0, π/2]`.
pub fn scan_double_tilted(alpha: &Axis, phi: &Axis) -> Result<Vec<DoubleTiltedRow>> {
    alpha.check_within("alpha", 0.0, 2.0, true, "[0, 2)")?;
    phi.check_within("phi", 0.0, FRAC_PI_2, false, "[0, pi/2]")?;
    grid(alpha, phi, double_tilted_cell)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WolfeYelinRow {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta_l: f64,
    pub beta_q: f64,
    pub admissible: bool,
    pub c1_extremal: bool,
    pub c2_extremal: bool,
    /// The closed-form realisation exists here (whether or not it beats the
    /// local bound) and both criteria call its point extremal.
    pub extended_extremal: bool,
}

pub fn wolfe_yelin_cell(alpha0: f64, alpha1: f64) -> Result<WolfeYelinRow> {
    let params = WolfeYelinParams::new(alpha0, alpha1)?;
    let sol = wolfe_yelin_solve(&params)?;
    let (c1, c2) = sol.realization.as_ref().map_or((false, false), both_extremal);
    let extended = wolfe_yelin_extended_realization(&params)
        .ok()
        .map(|r| both_extremal(&r))
        .is_some_and(|(x, y)| x && y);
    Ok(WolfeYelinRow {
        alpha0,
        alpha1,
        beta_l: sol.beta_l,
        beta_q: sol.beta_q,
        admissible: sol.admissible,
        c1_extremal: c1,
        c2_extremal: c2,
        extended_extremal: extended,
    })
}

/// Sweep over `α0 ∈ (-1, 1)`, `α1 ∈ [0, 2]`.
pub fn scan_wolfe_yelin(alpha0: &Axis, alpha1: &Axis) -> Result<Vec<WolfeYelinRow>> {
    alpha0.check_within("alpha0", -1.0, 1.0, true, "(-1, 1)")?;
    if alpha0.min <= -1.0 {
        return Err(ChshError::OutOfRange {
            name: "alpha0",
            value: alpha0.min,
            range: "(-1, 1)",
        });
    }
    alpha1.check_within("alpha1", 0.0, 2.0, false, "[0, 2]")?;
    grid(alpha0, alpha1, wolfe_yelin_cell)
}

/// Verdicts on one random realisation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub index: u64,
    pub theta: f64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub nonlocal: bool,
    pub c1_extremal: bool,
    pub c2_extremal: bool,
    pub agree: bool,
    pub lp_status: &'static str,
    pub i_max: f64,
    /// Empty when certification was not requested.
    pub certificate: &'static str,
}

pub fn compare_sample(seed: u64, index: u64, certify: bool) -> CompareRow {
    let r = seeded_realization(seed, index);
    let report = extremality_report(&r, Method::Both);
    let c1 = report.stlm.as_ref().is_some_and(|v| v.extremal);
    let c2 = report.threshold.as_ref().is_some_and(|v| v.extremal);
    let (status, i_max, certificate) = if certify {
        let cert = certify_with(&r, &MaximizeOptions::default());
        (cert.status, cert.i_max, cert.verdict.as_str())
    } else {
        let lp = solve_expose_lp(&build_expose_lp(&r));
        (lp.status, lp.i_max, "")
    };
    let [a0, a1, b0, b1] = r.angles();
    CompareRow {
        index,
        theta: r.theta(),
        a0,
        a1,
        b0,
        b1,
        nonlocal: report.nonlocal,
        c1_extremal: c1,
        c2_extremal: c2,
        agree: c1 == c2,
        lp_status: status.as_str(),
        i_max,
        certificate,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CompareSummary {
    pub samples: usize,
    pub nonlocal: usize,
    pub c1_extremal: usize,
    pub c2_extremal: usize,
    pub disagreements: usize,
    pub agreement_fraction: f64,
    pub lp_exposed_candidate: usize,
    pub lp_boundary: usize,
    pub lp_interior: usize,
    pub lp_degenerate: usize,
    pub proven_exposed: usize,
    /// Proven-exposed samples that both criteria call extremal.
    pub proven_exposed_extremal: usize,
    pub inconclusive: usize,
    pub not_extremal: usize,
}

impl CompareSummary {
    pub fn of(rows: &[CompareRow]) -> Self {
        let count = |f: &dyn Fn(&CompareRow) -> bool| rows.iter().filter(|r| f(r)).count();
        let status = |s: LpStatus| count(&|r| r.lp_status == s.as_str());
        let verdict = |v: Verdict| count(&|r| r.certificate == v.as_str());
        let disagreements = count(&|r| !r.agree);
        Self {
            samples: rows.len(),
            nonlocal: count(&|r| r.nonlocal),
            c1_extremal: count(&|r| r.c1_extremal),
            c2_extremal: count(&|r| r.c2_extremal),
            disagreements,
            agreement_fraction: if rows.is_empty() {
                1.0
            } else {
                1.0 - disagreements as f64 / rows.len() as f64
            },
            lp_exposed_candidate: status(LpStatus::ExposedCandidate),
            lp_boundary: status(LpStatus::Boundary),
            lp_interior: status(LpStatus::Interior),
            lp_degenerate: status(LpStatus::Degenerate),
            proven_exposed: verdict(Verdict::ProvenExposed),
            proven_exposed_extremal: count(&|r| {
                r.certificate == Verdict::ProvenExposed.as_str() && r.c1_extremal && r.c2_extremal
            }),
            inconclusive: verdict(Verdict::Inconclusive),
            not_extremal: verdict(Verdict::NotExtremal),
        }
    }
}

/// Samples `0..n` of the run seeded with `seed`, in index order.
pub fn compare(seed: u64, n: usize, certify: bool) -> (Vec<CompareRow>, CompareSummary) {
    let rows: Vec<CompareRow> = (0..n as u64)
        .into_par_iter()
        .map(|i| compare_sample(seed, i, certify))
        .collect();
    let summary = CompareSummary::of(&rows);
    (rows, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_endpoints() {
        let a = Axis::new(0.0, 1.0, 5).unwrap();
        assert_eq!(a.value(0), 0.0);
        assert_eq!(a.value(4), 1.0);
        assert!((a.value(2) - 0.5).abs() < 1e-15);
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn smoke_scans_have_steps_squared_rows() {
        let dt = scan_double_tilted(&Axis::new(0.0, 1.5, 2).unwrap(), &Axis::new(0.0, FRAC_PI_2, 2).unwrap()).unwrap();
        assert_eq!(dt.len(), 4);
        assert_eq!((dt[1].alpha, dt[1].phi), (0.0, FRAC_PI_2));
        let wy = scan_wolfe_yelin(&Axis::new(-0.5, 0.5, 3).unwrap(), &Axis::new(0.0, 2.0, 3).unwrap()).unwrap();
        assert_eq!(wy.len(), 9);
    }

    #[test]
    fn ranges_outside_the_box_are_rejected() {
        let phi = Axis::new(0.0, 1.0, 2).unwrap();
        assert!(scan_double_tilted(&Axis::new(0.0, 2.0, 2).unwrap(), &phi).is_err());
        assert!(scan_double_tilted(&Axis::new(-0.1, 1.0, 2).unwrap(), &phi).is_err());
        let a1 = Axis::new(0.0, 2.0, 2).unwrap();
        assert!(scan_wolfe_yelin(&Axis::new(-1.0, 0.0, 2).unwrap(), &a1).is_err());
        assert!(scan_wolfe_yelin(&Axis::new(0.0, 1.0, 2).unwrap(), &a1).is_err());
    }

    #[test]
    fn chsh_cells() {
        let row = double_tilted_cell(0.0, 0.3).unwrap();
        assert!(row.admissible && row.c1_extremal && row.c2_extremal);
        let row = wolfe_yelin_cell(0.0, 0.0).unwrap();
        assert!(row.admissible && row.c1_extremal && row.c2_extremal && row.extended_extremal);
    }

    #[test]
    fn compare_is_deterministic() {
        let (a, sa) = compare(3, 40, false);
        let (b, _) = compare(3, 40, false);
        assert_eq!(a, b);
        assert_eq!(sa.samples, 40);
        assert_eq!(sa.disagreements, 0);
        let (empty, s) = compare(3, 0, false);
        assert!(empty.is_empty());
        assert_eq!(s.samples, 0);
    }

    #[test]
    fn proven_exposed_samples_are_extremal() {
        let (_, s) = compare(11, 30, true);
        assert_eq!(s.proven_exposed, s.proven_exposed_extremal);
        assert_eq!(s.inconclusive + s.not_extremal + s.proven_exposed, 30);
    }
}
