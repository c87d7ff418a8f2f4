//! Searching for exposing functionals by linear programming.
//!
//! A functional `F` whose quantum maximum is attained at the point `P` must
//! be stationary along every direction in which the realisation can move, so
//! `F` is orthogonal to the five parameter gradients of `P`. Among those
//! functionals we maximize `F·P` with the local value of `F` capped at one.
//! A value above one is necessary for `P` to be exposed; the certificate then
//! checks that the functional really is uniquely maximized at `P`.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::SMatrix;
use serde::Serialize;

use crate::model::{dot8, ProbabilityPoint, Realization};
use crate::polytope::{deterministic_points, Functional};
use crate::spectrum::{maximize_with, MaximizeOptions, QuantumMaximum};

/// Tolerance on `I_max` around the local bound.
pub const LP_TOLERANCE: f64 = 1e-9;
/// Singular values below this (relative) count as zero in the tangency system.
const NULL_TOL: f64 = 1e-9;
/// Objective rows shorter than this make the program meaningless.
const DEGENERATE_OBJECTIVE: f64 = 1e-12;
/// Distance under which the round-trip maximizer counts as the input point.
pub const ROUND_TRIP_TOL: f64 = 1e-6;

/// Derivatives of the correlation vector with respect to `θ, a₀, a₁, b₀, b₁`.
pub fn point_gradients(r: &Realization) -> [[f64; 8]; 5] {
    let (st, ct) = r.theta().sin_cos();
    let al = r.alice().map(f64::sin_cos);
    let bo = r.bob().map(f64::sin_cos);
    let mut g = [[0.0; 8]; 5];
    for x in 0..2 {
        g[0][x] = -st * al[x].1;
        g[1 + x][x] = -ct * al[x].0;
    }
    for y in 0..2 {
        g[0][2 + y] = -st * bo[y].1;
        g[3 + y][2 + y] = -ct * bo[y].0;
    }
    for x in 0..2 {
        for y in 0..2 {
            let k = 4 + 2 * x + y;
            let (sa, ca) = al[x];
            let (sb, cb) = bo[y];
            g[0][k] = ct * sa * sb;
            g[1 + x][k] = -sa * cb + st * ca * sb;
            g[3 + y][k] = -ca * sb + st * sa * cb;
        }
    }
    g
}

/// The linear program attached to a realisation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExposeProblem {
    pub point: ProbabilityPoint,
    pub realization: Realization,
    /// Tangency rows, one per parameter.
    pub gradients: [[f64; 8]; 5],
    /// `F·P_j ≤ 1` for each deterministic point `P_j`.
    pub normalization: [[f64; 8]; 16],
}

pub fn build_expose_lp(r: &Realization) -> ExposeProblem {
    ExposeProblem {
        point: r.point(),
        realization: *r,
        gradients: point_gradients(r),
        normalization: deterministic_points().map(|p| p.components()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    ExposedCandidate,
    Boundary,
    Interior,
    Degenerate,
}

impl LpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LpStatus::ExposedCandidate => "exposed-candidate",
            LpStatus::Boundary => "boundary",
            LpStatus::Interior => "interior",
            LpStatus::Degenerate => "degenerate",
        }
    }

    fn of(i_max: f64) -> Self {
        if i_max > 1.0 + LP_TOLERANCE {
            LpStatus::ExposedCandidate
        } else if i_max >= 1.0 - LP_TOLERANCE {
            LpStatus::Boundary
        } else {
            LpStatus::Interior
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExposeResult {
    pub functional: Functional,
    pub i_max: f64,
    pub status: LpStatus,
    /// Dimension of the space of functionals satisfying the tangency rows.
    pub free_dimensions: usize,
}

impl ExposeResult {
    fn degenerate(free_dimensions: usize) -> Self {
        Self {
            functional: Functional::default(),
            i_max: 0.0,
            status: LpStatus::Degenerate,
            free_dimensions,
        }
    }
}

pub fn solve_expose_lp(p: &ExposeProblem) -> ExposeResult {
    solve_with_equalities(p, &p.gradients)
}

/// Orthonormal basis (as columns) of the vectors orthogonal to every row.
pub(crate) fn null_space(rows: &[[f64; 8]]) -> Vec<[f64; 8]> {
    // Padding to a square matrix gives a full set of left singular vectors.
    let mut m = SMatrix::<f64, 8, 8>::zeros();
    for (j, row) in rows.iter().take(8).enumerate() {
        for i in 0..8 {
            m[(i, j)] = row[i];
        }
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let cut = NULL_TOL * smax.max(1.0);
    (0..8)
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| std::array::from_fn(|i| u[(i, k)]))
        .collect()
}

pub(crate) fn solve_with_equalities(p: &ExposeProblem, rows: &[[f64; 8]]) -> ExposeResult {
    let basis = null_space(rows);
    let k = basis.len();
    let point = p.point.components();
    let objective: Vec<f64> = basis.iter().map(|n| dot8(n, &point)).collect();
    if k == 0 || objective.iter().map(|v| v * v).sum::<f64>().sqrt() < DEGENERATE_OBJECTIVE {
        return ExposeResult::degenerate(k);
    }

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = objective
        .iter()
        .map(|&c| lp.add_var(c, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for row in &p.normalization {
        let terms: Vec<_> = vars.iter().zip(&basis).map(|(&v, n)| (v, dot8(n, row))).collect();
        lp.add_constraint(&terms, ComparisonOp::Le, 1.0);
    }
    let solution = match lp.solve().map(|o| o.into_solution()) {
        Ok(Ok(s)) => s,
        _ => return ExposeResult::degenerate(k),
    };
    let mut coeffs = [0.0; 8];
    for (&v, n) in vars.iter().zip(&basis) {
        let y = solution.var_value(v);
        for i in 0..8 {
            coeffs[i] += y * n[i];
        }
    }
    let Ok(functional) = Functional::new(coeffs) else {
        return ExposeResult::degenerate(k);
    };
    let i_max = functional.value(&p.point);
    ExposeResult {
        functional,
        i_max,
        status: LpStatus::of(i_max),
        free_dimensions: k,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    ProvenExposed,
    Inconclusive,
    NotExtremal,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ProvenExposed => "PROVEN-EXPOSED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::NotExtremal => "NOT-EXTREMAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub functional: Functional,
    pub i_max: f64,
    pub status: LpStatus,
    /// Distance between the maximizer of the functional and the input point.
    pub round_trip_distance: Option<f64>,
    pub unique: bool,
    pub maximum: Option<QuantumMaximum>,
    pub reason: String,
}

pub fn certify_exposed(r: &Realization) -> Certificate {
    certify_with(r, &MaximizeOptions::default())
}

pub fn certify_with(r: &Realization, opts: &MaximizeOptions) -> Certificate {
    let problem = build_expose_lp(r);
    let lp = solve_expose_lp(&problem);
    let mut cert = Certificate {
        verdict: Verdict::Inconclusive,
        functional: lp.functional,
        i_max: lp.i_max,
        status: lp.status,
        round_trip_distance: None,
        unique: false,
        maximum: None,
        reason: String::new(),
    };
    match lp.status {
        LpStatus::Interior => {
            cert.verdict = Verdict::NotExtremal;
            cert.reason = "no tangent functional separates the point from the local set".into();
            return cert;
        }
        LpStatus::Degenerate => {
            cert.reason = "the tangency system leaves no usable functional".into();
            return cert;
        }
        _ => {}
    }
    let maximum = match maximize_with(&lp.functional, opts) {
        Ok(m) => m,
        Err(e) => {
            cert.reason = format!("maximization failed: {e}");
            return cert;
        }
    };
    let distance = maximum.point.distance(&problem.point);
    cert.round_trip_distance = Some(distance);
    cert.unique = maximum.unique;
    cert.reason = if !maximum.unique {
        "the functional has several maximizers".into()
    } else if distance > ROUND_TRIP_TOL {
        format!("the functional is maximized elsewhere (distance {distance:e})")
    } else {
        cert.verdict = Verdict::ProvenExposed;
        "the functional is uniquely maximized at the point".into()
    };
    cert.maximum = Some(maximum);
    cert
}
