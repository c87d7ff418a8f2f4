//! The ellipse traced by a realisation as `θ` varies, where it meets the
//! positivity facets, and explicit convex decompositions below the
//! threshold angle.

use serde::Serialize;

use super::criteria::{theta_star, DEGENERATE_PAIR_TOL};
use crate::model::{max_abs_diff, normalize_angle, sign, ProbabilityPoint, Realization};
use crate::polytope::{
    apply_relabels, deterministic_index, deterministic_points, local_decomposition_witness, undo_relabels,
    LocalDecomposition, Relabel,
};

const EPS: f64 = 1e-12;

/// `P(θ) = P0 + cos θ · Pm + sin θ · Pc` for fixed measurement angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipseDecomposition {
    pub p0: [f64; 8],
    pub pm: [f64; 8],
    pub pc: [f64; 8],
}

impl EllipseDecomposition {
    pub fn new(alice: [f64; 2], bob: [f64; 2]) -> Self {
        let (sa, ca) = (alice.map(f64::sin), alice.map(f64::cos));
        let (sb, cb) = (bob.map(f64::sin), bob.map(f64::cos));
        let mut e = Self {
            p0: [0.0; 8],
            pm: [ca[0], ca[1], cb[0], cb[1], 0.0, 0.0, 0.0, 0.0],
            pc: [0.0; 8],
        };
        for x in 0..2 {
            for y in 0..2 {
                e.p0[4 + 2 * x + y] = ca[x] * cb[y];
                e.pc[4 + 2 * x + y] = sa[x] * sb[y];
            }
        }
        e
    }

    pub fn of(r: &Realization) -> Self {
        Self::new(r.alice(), r.bob())
    }

    /// The point at ellipse coordinates `(u, v)`; `(cos θ, sin θ)` lies on
    /// the quantum arc.
    pub fn at_coords(&self, u: f64, v: f64) -> [f64; 8] {
        std::array::from_fn(|i| self.p0[i] + u * self.pm[i] + v * self.pc[i])
    }

    pub fn at(&self, theta: f64) -> [f64; 8] {
        self.at_coords(theta.cos(), theta.sin())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FacetContact {
    /// `p(ab|xy)` vanishes at exactly this state angle.
    At { sin_theta: f64, cos_theta: f64 },
    /// `p(ab|xy)` vanishes for every `θ`.
    AllTheta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FacetTouch {
    pub a: usize,
    pub b: usize,
    pub contact: FacetContact,
}

/// Outcome pairs `(a, b)` whose probability `p(ab|xy)` vanishes somewhere
/// on the arc `θ ∈ [0, π/2]`, for measurement angles `a_x`, `b_y`.
///
/// With `A = ±sin a_x sin b_y`, `B = ±cos a_x ± cos b_y` and
/// `C = 1 ± cos a_x cos b_y`, `4p = C + B cos θ + A sin θ`; a touch needs
/// `A, B ≤ 0` and occurs at `sin θ = -A/C`, `cos θ = -B/C`.
pub fn facet_touch_angles(a_x: f64, b_y: f64) -> Vec<FacetTouch> {
    let (sa, ca) = a_x.sin_cos();
    let (sb, cb) = b_y.sin_cos();
    let mut out = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let (s_a, s_b) = (sign(a), sign(b));
            let big_a = s_a * s_b * sa * sb;
            let big_b = s_a * ca + s_b * cb;
            let big_c = 1.0 + s_a * s_b * ca * cb;
            let contact = if big_c.abs() <= EPS {
                if big_b.abs() <= EPS {
                    FacetContact::AllTheta
                } else {
                    continue;
                }
            } else if big_a <= EPS && big_b <= EPS {
                FacetContact::At {
                    sin_theta: (-big_a / big_c).max(0.0),
                    cos_theta: (-big_b / big_c).max(0.0),
                }
            } else {
                continue;
            };
            out.push(FacetTouch { a, b, contact });
        }
    }
    out
}

/// Residuals `(b² - 4c²) - Π_ab 4 p(ab|xy)` per setting pair.
pub fn discriminant_probability_identity(p: &ProbabilityPoint) -> [f64; 4] {
    let mut out = [0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            let (a, bb, c) = (p.alice(x), p.bob(y), p.correlator(x, y));
            let b = c * c - a * a - bb * bb + 1.0;
            let cc = c - a * bb;
            let prod: f64 = (0..4).map(|i| 4.0 * p.probability(i >> 1, i & 1, x, y)).product();
            out[2 * x + y] = b * b - 4.0 * cc * cc - prod;
        }
    }
    out
}

/// Convex decomposition of a point below the threshold angle when some
/// setting pair is degenerate.
///
/// The point lies in the triangle spanned by `P(0)`, the threshold point
/// `P(θ*)`, and the tangent intersection `P_E`, which is local.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionWitness {
    pub sin_theta_star: f64,
    /// `[P(0), P_E, P(θ*)]`.
    pub points: [[f64; 8]; 3],
    pub weights: [f64; 3],
    /// `P_E` as a mixture of deterministic points.
    pub tangent_decomposition: LocalDecomposition,
    /// `max |Σ w_i P_i - P(θ)|`.
    pub reconstruction_error: f64,
}

/// Builds the witness, or `None` when no pair is degenerate or
/// `sin θ > sin θ*`.
pub fn decomposition_witness(r: &Realization) -> Option<DecompositionWitness> {
    let ops = canonical_relabels(r)?;
    let t = theta_star(r.alice(), r.bob());
    let (ss, sin_theta) = (t.sin_theta_star, r.theta().sin());
    if ss <= EPS || sin_theta > ss + EPS {
        return None;
    }
    let cs = (1.0 - ss * ss).max(0.0).sqrt();
    let tan_half = ss / (1.0 + cs);
    let e = EllipseDecomposition::of(r);
    let points = [e.at_coords(1.0, 0.0), e.at_coords(1.0, tan_half), e.at_coords(cs, ss)];

    let canonical_pe = apply_relabels(&ops, &points[1]);
    let local = local_decomposition_witness(&canonical_pe)?;
    let vertex_indices = local
        .vertex_indices
        .iter()
        .map(|&i| deterministic_index(&undo_relabels(&ops, &deterministic_points()[i].components())))
        .collect::<Option<Vec<usize>>>()?;
    let tangent_decomposition = LocalDecomposition {
        vertex_indices,
        weights: local.weights,
    };

    let (st, ct) = (sin_theta, r.theta().cos());
    let clean = |w: f64| if w < 0.0 && w > -EPS { 0.0 } else { w };
    let w_s = clean((1.0 - ct) / (1.0 - cs));
    let w_e = clean((st - w_s * ss) / tan_half);
    let w_a = clean(1.0 - w_s - w_e);
    let weights = [w_a, w_e, w_s];
    let target = r.point().components();
    let mix: [f64; 8] = std::array::from_fn(|i| (0..3).map(|k| weights[k] * points[k][i]).sum());
    Some(DecompositionWitness {
        sin_theta_star: ss,
        points,
        weights,
        tangent_decomposition,
        reconstruction_error: max_abs_diff(&mix, &target),
    })
}

/// Relabelings taking a degenerate pair to `(0, 0)` with `a0 = b0 = 0`,
/// and `a1, b1` into `[0, π]`.
fn canonical_relabels(r: &Realization) -> Option<Vec<Relabel>> {
    let (x, y) = (0..4)
        .map(|k| (k >> 1, k & 1))
        .find(|&(x, y)| ((r.a(x).cos() * r.b(y).cos()).abs() - 1.0).abs() <= DEGENERATE_PAIR_TOL)?;
    let mut ops = Vec::new();
    let mut al = r.alice();
    let mut bo = r.bob();
    if x == 1 {
        ops.push(Relabel::SwapAlice);
        al.swap(0, 1);
    }
    if y == 1 {
        ops.push(Relabel::SwapBob);
        bo.swap(0, 1);
    }
    if al[0].cos() < 0.0 {
        ops.push(Relabel::FlipAlice(0));
        al[0] = normalize_angle(al[0] + std::f64::consts::PI);
    }
    if bo[0].cos() < 0.0 {
        ops.push(Relabel::FlipBob(0));
        bo[0] = normalize_angle(bo[0] + std::f64::consts::PI);
    }
    if al[1].sin() < 0.0 {
        ops.push(Relabel::FlipAlice(1));
    }
    if bo[1].sin() < 0.0 {
        ops.push(Relabel::FlipBob(1));
    }
    Some(ops)
}
