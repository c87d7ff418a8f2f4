//! Saturation tests for correlator inequalities and the state-angle
//! threshold used by the two extremality criteria.

use serde::Serialize;

use super::geometry::{decomposition_witness, DecompositionWitness};
use super::reconstruct::RealizationQuadratic;
use crate::model::Realization;
use crate::polytope::is_nonlocal;

/// Tolerance for saturation residuals and root comparisons.
pub const SATURATION_TOL: f64 = 1e-9;
/// `|cos a cos b|` within this of 1 marks a degenerate setting pair.
pub const DEGENERATE_PAIR_TOL: f64 = 1e-12;
const D_EPS: f64 = 1e-15;

/// `|C00 C01 - C10 C11| - √(1-C00²)√(1-C01²) - √(1-C10²)√(1-C11²)`;
/// non-positive for every quantum point, zero on saturation.
pub fn tlm_residual(c: [f64; 4]) -> f64 {
    let c = c.map(|v| v.clamp(-1.0, 1.0));
    tlm_from_parts(c, c.map(|v| (1.0 - v * v).max(0.0).sqrt()))
}

pub fn tlm_saturated(c: [f64; 4]) -> bool {
    tlm_residual(c).abs() < SATURATION_TOL
}

/// Same residual with each `√(1 - C²)` supplied by the caller, who can
/// often compute it without cancellation.
fn tlm_from_parts(c: [f64; 4], roots: [f64; 4]) -> f64 {
    (c[0] * c[1] - c[2] * c[3]).abs() - roots[0] * roots[1] - roots[2] * roots[3]
}

/// Normalised correlators for both normalisation choices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StlmCheck {
    /// `D_x = √(⟨A_x⟩² + sin²θ)`.
    pub d_alice: [f64; 2],
    /// `D_y = √(⟨B_y⟩² + sin²θ)`.
    pub d_bob: [f64; 2],
    /// `C_xy / D_x`.
    pub normalized_by_alice: [f64; 4],
    /// `C_xy / D_y`.
    pub normalized_by_bob: [f64; 4],
    pub residuals: [f64; 2],
    pub degenerate: bool,
    pub saturated: bool,
}

/// Both self-testing correlator inequalities at the realisation's point.
pub fn stlm_check(r: &Realization) -> StlmCheck {
    let th = r.theta();
    let (st, ct) = th.sin_cos();
    let (sa, ca): ([f64; 2], [f64; 2]) = (r.alice().map(f64::sin), r.alice().map(f64::cos));
    let (sb, cb): ([f64; 2], [f64; 2]) = (r.bob().map(f64::sin), r.bob().map(f64::cos));
    let d_alice: [f64; 2] = std::array::from_fn(|x| (ct * ca[x]).hypot(st));
    let d_bob: [f64; 2] = std::array::from_fn(|y| (ct * cb[y]).hypot(st));
    let mut degenerate = false;
    let mut nb_a = [0.0; 4];
    let mut root_a = [1.0; 4];
    let mut nb_b = [0.0; 4];
    let mut root_b = [1.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            let k = 2 * x + y;
            let c = ca[x] * cb[y] + st * sa[x] * sb[y];
            // u = (cos a, s sin a), v = (cos b, sin b): C = u·v, |u| = D_x
            let dx = (ca[x]).hypot(st * sa[x]);
            if dx > D_EPS {
                nb_a[k] = c / dx;
                root_a[k] = (ca[x] * sb[y] - st * sa[x] * cb[y]).abs() / dx;
            } else {
                degenerate = true;
            }
            let dy = (cb[y]).hypot(st * sb[y]);
            if dy > D_EPS {
                nb_b[k] = c / dy;
                root_b[k] = (sa[x] * cb[y] - st * ca[x] * sb[y]).abs() / dy;
            } else {
                degenerate = true;
            }
        }
    }
    let residuals = [tlm_from_parts(nb_a, root_a), tlm_from_parts(nb_b, root_b)];
    StlmCheck {
        d_alice,
        d_bob,
        normalized_by_alice: nb_a,
        normalized_by_bob: nb_b,
        residuals,
        degenerate,
        saturated: residuals.iter().all(|&v| v.abs() < SATURATION_TOL),
    }
}

/// Saturation of the plain correlator inequality by the same measurements
/// on the maximally entangled state, where `C_xy = cos(a_x - b_y)`.
pub fn tlm_residual_maximally_entangled(r: &Realization) -> f64 {
    let mut c = [0.0; 4];
    let mut roots = [0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            let (sd, cd) = (r.a(x) - r.b(y)).sin_cos();
            c[2 * x + y] = cd;
            roots[2 * x + y] = sd.abs();
        }
    }
    tlm_from_parts(c, roots)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdBranch {
    /// `sin a sin b / (1 - cos a cos b)`.
    Minus,
    /// `-sin a sin b / (1 + cos a cos b)`.
    Plus,
}

/// Smallest `sin θ` at which a point with these measurements can be
/// extremal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub sin_theta_star: f64,
    pub pair: Option<(usize, usize)>,
    pub branch: Option<ThresholdBranch>,
    /// Setting pairs with `|cos a_x cos b_y| = 1`, excluded from the maximum.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

impl Threshold {
    pub fn degenerate(&self) -> bool {
        !self.degenerate_pairs.is_empty()
    }
}

pub fn theta_star(alice: [f64; 2], bob: [f64; 2]) -> Threshold {
    let mut t = Threshold {
        sin_theta_star: 0.0,
        pair: None,
        branch: None,
        degenerate_pairs: Vec::new(),
    };
    let mut best = f64::NEG_INFINITY;
    for x in 0..2 {
        for y in 0..2 {
            let (sa, ca) = alice[x].sin_cos();
            let (sb, cb) = bob[y].sin_cos();
            let (cc, ss) = (ca * cb, sa * sb);
            if (cc.abs() - 1.0).abs() <= DEGENERATE_PAIR_TOL {
                t.degenerate_pairs.push((x, y));
                continue;
            }
            for (v, br) in [
                (ss / (1.0 - cc), ThresholdBranch::Minus),
                (-ss / (1.0 + cc), ThresholdBranch::Plus),
            ] {
                if v > best {
                    best = v;
                    t.pair = Some((x, y));
                    t.branch = Some(br);
                }
            }
        }
    }
    if best.is_finite() {
        t.sin_theta_star = best.clamp(0.0, 1.0);
    }
    t
}

/// Verdict of the criterion built on the self-testing correlator
/// inequalities and the shared-root condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StlmVerdict {
    pub extremal: bool,
    pub nonlocal: bool,
    pub stlm: StlmCheck,
    pub z_plus: [f64; 4],
    pub sin2_theta: f64,
    /// `max_xy |z+_xy - sin²θ|`.
    pub root_residual: f64,
}

/// Verdict of the criterion built on the maximally entangled correlator
/// inequality and the state-angle threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdVerdict {
    pub extremal: bool,
    pub nonlocal: bool,
    pub tlm_residual: f64,
    pub sin_theta: f64,
    pub threshold: Threshold,
    /// Explicit convex decomposition when the threshold is degenerate and
    /// `θ` lies below it.
    pub witness: Option<DecompositionWitness>,
}

fn shared_root_residual(r: &Realization) -> ([f64; 4], f64, f64) {
    let z = r.theta().sin().powi(2);
    let q = RealizationQuadratic::from_point(&r.point());
    let res = q.z_plus.iter().map(|zp| (zp - z).abs()).fold(0.0, f64::max);
    (q.z_plus, z, res)
}

pub fn stlm_verdict(r: &Realization) -> StlmVerdict {
    let nonlocal = is_nonlocal(&r.point());
    let stlm = stlm_check(r);
    let (z_plus, sin2_theta, root_residual) = shared_root_residual(r);
    StlmVerdict {
        extremal: nonlocal && stlm.saturated && root_residual <= SATURATION_TOL,
        nonlocal,
        stlm,
        z_plus,
        sin2_theta,
        root_residual,
    }
}

pub fn threshold_verdict(r: &Realization) -> ThresholdVerdict {
    let nonlocal = is_nonlocal(&r.point());
    let tlm = tlm_residual_maximally_entangled(r);
    let threshold = theta_star(r.alice(), r.bob());
    let sin_theta = r.theta().sin();
    let above = sin_theta >= threshold.sin_theta_star - SATURATION_TOL;
    let witness = if threshold.degenerate() && !above {
        decomposition_witness(r)
    } else {
        None
    };
    ThresholdVerdict {
        extremal: nonlocal && tlm.abs() < SATURATION_TOL && above,
        nonlocal,
        tlm_residual: tlm,
        sin_theta,
        threshold,
        witness,
    }
}

/// Compares "every `z+_xy` equals `sin²θ`" with "`sin θ ≥ sin θ*`" without
/// any nonlocality filter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub roots_equal: bool,
    pub above_threshold: bool,
    pub agree: bool,
    /// `sin θ - sin θ*`.
    pub margin: f64,
    pub root_residual: f64,
}

pub fn conjecture_equivalence_check(r: &Realization) -> EquivalenceCheck {
    let (_, _, root_residual) = shared_root_residual(r);
    let t = theta_star(r.alice(), r.bob());
    let margin = r.theta().sin() - t.sin_theta_star;
    let roots_equal = root_residual <= SATURATION_TOL;
    let above_threshold = margin >= -SATURATION_TOL;
    EquivalenceCheck {
        roots_equal,
        above_threshold,
        agree: roots_equal == above_threshold,
        margin,
        root_residual,
    }
}
