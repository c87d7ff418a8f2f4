//! Recovering canonical realisations from a correlation vector.
//!
//! For each setting pair the quantity `z = sin²θ` solves
//! `z² - b_xy z + c_xy² = 0` with `b_xy = C² - A² - B² + 1` and
//! `c_xy = C - AB`.  A point has a canonical realisation with nonzero
//! marginals iff the four quadratics share a root that also satisfies the
//! marginal bound and the product condition.

use serde::Serialize;

use crate::error::{ChshError, Result};
use crate::model::{max_abs_diff, ProbabilityPoint, Realization};

/// Points whose marginals are all below this use the zero-marginal branch.
pub const ZERO_MARGINAL_TOL: f64 = 1e-10;
const ROOT_MATCH_TOL: f64 = 1e-9;
const CONDITION_TOL: f64 = 1e-10;
const REPRODUCE_TOL: f64 = 1e-9;
const SINE_EPS: f64 = 1e-12;

/// The four per-pair quadratics, index `2x + y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealizationQuadratic {
    pub b: [f64; 4],
    pub c: [f64; 4],
    /// `b² - 4c²` evaluated as `Π_ab 4 p(ab|xy)`, which keeps full relative
    /// precision next to the facets.
    pub discriminant: [f64; 4],
    pub z_plus: [f64; 4],
    pub z_minus: [f64; 4],
}

impl RealizationQuadratic {
    pub fn from_point(p: &ProbabilityPoint) -> Self {
        let mut q = Self {
            b: [0.0; 4],
            c: [0.0; 4],
            discriminant: [0.0; 4],
            z_plus: [0.0; 4],
            z_minus: [0.0; 4],
        };
        for x in 0..2 {
            for y in 0..2 {
                let k = 2 * x + y;
                let (a, bb, c) = (p.alice(x), p.bob(y), p.correlator(x, y));
                q.b[k] = c * c - a * a - bb * bb + 1.0;
                q.c[k] = c - a * bb;
                let disc: f64 = (0..4).map(|i| 4.0 * p.probability(i >> 1, i & 1, x, y)).product();
                q.discriminant[k] = disc;
                let r = disc.max(0.0).sqrt();
                q.z_plus[k] = (q.b[k] + r) / 2.0;
                q.z_minus[k] = (q.b[k] - r) / 2.0;
            }
        }
        q
    }

    /// `b² - 4c²` evaluated directly.
    pub fn discriminant_direct(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.b[k] * self.b[k] - 4.0 * self.c[k] * self.c[k])
    }
}

/// How well a candidate `z` satisfies the three reconstruction conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub z: f64,
    /// `max_xy |z² - b z + c²|`.
    pub root_residual: f64,
    /// `min(1 - z - A_x², 1 - z - B_y²)`; non-negative when satisfied.
    pub marginal_slack: f64,
    /// `Π_xy (C_xy - A_x B_y / (1 - z))`; non-negative when satisfied.
    pub product: f64,
}

impl ConditionCheck {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.root_residual <= tol && self.marginal_slack >= -tol && self.product >= -tol
    }
}

pub fn check_conditions(p: &ProbabilityPoint, z: f64) -> ConditionCheck {
    let q = RealizationQuadratic::from_point(p);
    let root_residual = (0..4)
        .map(|k| (z * z - q.b[k] * z + q.c[k] * q.c[k]).abs())
        .fold(0.0, f64::max);
    let m = p.marginals();
    let marginal_slack = m.iter().map(|v| 1.0 - z - v * v).fold(f64::INFINITY, f64::min);
    let product = if 1.0 - z > 0.0 {
        (0..2)
            .flat_map(|x| (0..2).map(move |y| (x, y)))
            .map(|(x, y)| p.correlator(x, y) - p.alice(x) * p.bob(y) / (1.0 - z))
            .product()
    } else {
        f64::NAN
    };
    ConditionCheck {
        z,
        root_residual,
        marginal_slack,
        product,
    }
}

/// All canonical realisations with `θ ∈ [0, π/2)` reproducing `p`, up to
/// the sign symmetry `a, b → -a, -b` (fixed by `sin a0 ≥ 0`).
///
/// Fails with a precondition error when every marginal vanishes; such
/// points need [`zero_marginal_realization`].
pub fn realizations_from_point(p: &ProbabilityPoint) -> Result<Vec<Realization>> {
    if p.marginals().iter().all(|m| m.abs() <= ZERO_MARGINAL_TOL) {
        return Err(ChshError::Precondition(
            "all marginals vanish; use the zero-marginal reconstruction".into(),
        ));
    }
    let q = RealizationQuadratic::from_point(p);
    let mut zs: Vec<f64> = Vec::new();
    for z in [q.z_plus[0], q.z_minus[0]] {
        let shared =
            (1..4).all(|k| (q.z_plus[k] - z).abs() <= ROOT_MATCH_TOL || (q.z_minus[k] - z).abs() <= ROOT_MATCH_TOL);
        if shared && !zs.iter().any(|w| (w - z).abs() <= ROOT_MATCH_TOL) {
            zs.push(z);
        }
    }
    let mut out: Vec<Realization> = Vec::new();
    for z in zs {
        if !(-CONDITION_TOL..1.0).contains(&z) {
            continue;
        }
        let z = z.max(0.0);
        let check = check_conditions(p, z);
        if check.marginal_slack < -CONDITION_TOL || check.product < -CONDITION_TOL {
            continue;
        }
        let w = complement(p, &q, z);
        let best = [realization_for_z(p, z, w, false), realization_for_z(p, z, w, true)]
            .into_iter()
            .flatten()
            .map(|r| (max_abs_diff(&r.point().components(), &p.components()), r))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((err, r)) = best {
            if err <= REPRODUCE_TOL {
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// `1 - z` without cancellation.  `w = 1 - z` solves
/// `w² - (1 + A² + B² - C²) w + (A² + B² - 2ABC + A²B²) = 0`, whose
/// discriminant equals that of the `z` quadratic; the smaller root is taken
/// from the product of roots.
fn complement(p: &ProbabilityPoint, q: &RealizationQuadratic, z: f64) -> f64 {
    let (x, y) = (0..4)
        .map(|k| (k >> 1, k & 1))
        .max_by(|&(x0, y0), &(x1, y1)| {
            let m = |x: usize, y: usize| p.alice(x).abs().max(p.bob(y).abs());
            m(x0, y0).total_cmp(&m(x1, y1))
        })
        .unwrap();
    let k = 2 * x + y;
    let (a, b, c) = (p.alice(x), p.bob(y), p.correlator(x, y));
    let sum = 1.0 + a * a + b * b - c * c;
    let prod = a * a + b * b - 2.0 * a * b * c + a * a * b * b;
    let w_big = (sum + q.discriminant[k].max(0.0).sqrt()) / 2.0;
    let w_small = if w_big > 0.0 { prod / w_big } else { 0.0 };
    // z+ pairs with the smaller complement
    let w = if (q.z_plus[k] - z).abs() <= (q.z_minus[k] - z).abs() {
        w_small
    } else {
        w_big
    };
    if (w - (1.0 - z)).abs() <= 1e-6 {
        w.max(0.0)
    } else {
        1.0 - z
    }
}

/// Builds the realisation for a shared root.  Sine magnitudes come either
/// from `√(1 - cos²)` or, with `from_products`, from the products
/// `s_xy = sin a_x sin b_y` divided by the largest sine, which is accurate
/// when some sine is tiny.
fn realization_for_z(p: &ProbabilityPoint, z: f64, w: f64, from_products: bool) -> Option<Realization> {
    let (st, ct) = (z.sqrt(), w.sqrt());
    let theta = st.atan2(ct);
    let cos_a: [f64; 2] = std::array::from_fn(|x| (p.alice(x) / ct).clamp(-1.0, 1.0));
    let cos_b: [f64; 2] = std::array::from_fn(|y| (p.bob(y) / ct).clamp(-1.0, 1.0));
    let mut sin_a = cos_a.map(|c| (1.0 - c * c).max(0.0).sqrt());
    let mut sin_b = cos_b.map(|c| (1.0 - c * c).max(0.0).sqrt());
    if st > 0.0 {
        let s = |x: usize, y: usize| (p.correlator(x, y) - p.alice(x) * p.bob(y) / w) / st;
        if from_products {
            let xa = if sin_a[0] >= sin_a[1] { 0 } else { 1 };
            let yb = if sin_b[0] >= sin_b[1] { 0 } else { 1 };
            if sin_a[xa] >= sin_b[yb] {
                if sin_a[xa] <= SINE_EPS {
                    return None;
                }
                for y in 0..2 {
                    sin_b[y] = s(xa, y) / sin_a[xa];
                }
                let yb = if sin_b[0].abs() >= sin_b[1].abs() { 0 } else { 1 };
                for x in 0..2 {
                    if x != xa && sin_b[yb].abs() > SINE_EPS {
                        sin_a[x] = s(x, yb) / sin_b[yb];
                    }
                }
            } else {
                if sin_b[yb] <= SINE_EPS {
                    return None;
                }
                for x in 0..2 {
                    sin_a[x] = s(x, yb) / sin_b[yb];
                }
                let xa = if sin_a[0].abs() >= sin_a[1].abs() { 0 } else { 1 };
                for y in 0..2 {
                    if y != yb && sin_a[xa].abs() > SINE_EPS {
                        sin_b[y] = s(xa, y) / sin_a[xa];
                    }
                }
            }
            if sin_a[0] < 0.0 || (sin_a[0] == 0.0 && sin_a[1] < 0.0) {
                sin_a = sin_a.map(|v| -v);
                sin_b = sin_b.map(|v| -v);
            }
        } else if let Some(x0) = (0..2).find(|&x| sin_a[x] > SINE_EPS) {
            for y in 0..2 {
                if s(x0, y) < 0.0 {
                    sin_b[y] = -sin_b[y];
                }
            }
            let y0 = if sin_b[0].abs() >= sin_b[1].abs() { 0 } else { 1 };
            for x in 0..2 {
                if x != x0 && s(x, y0) * sin_b[y0] < 0.0 {
                    sin_a[x] = -sin_a[x];
                }
            }
        }
    }
    let angle = |s: f64, c: f64| s.atan2(c);
    Realization::new(
        theta,
        angle(sin_a[0], cos_a[0]),
        angle(sin_a[1], cos_a[1]),
        angle(sin_b[0], cos_b[0]),
        angle(sin_b[1], cos_b[1]),
    )
    .ok()
}

/// Realisation of a zero-marginal point with the maximally entangled state
/// (`θ = π/2`, `a0 = 0`), if one exists.  Then `C_xy = cos(a_x - b_y)`.
pub fn zero_marginal_realization(p: &ProbabilityPoint) -> Result<Option<Realization>> {
    if p.marginals().iter().any(|m| m.abs() > ZERO_MARGINAL_TOL) {
        return Err(ChshError::Precondition("point has nonzero marginals".into()));
    }
    let acos = |c: f64| c.clamp(-1.0, 1.0).acos();
    let (t0, t1) = (acos(p.correlator(0, 0)), acos(p.correlator(0, 1)));
    let t2 = acos(p.correlator(1, 0));
    for s0 in [1.0, -1.0] {
        for s1 in [1.0, -1.0] {
            let (b0, b1) = (s0 * t0, s1 * t1);
            for s2 in [1.0, -1.0] {
                let a1 = b0 + s2 * t2;
                if ((a1 - b1).cos() - p.correlator(1, 1)).abs() <= REPRODUCE_TOL {
                    let r = Realization::new(std::f64::consts::FRAC_PI_2, 0.0, a1, b0, b1)?;
                    if max_abs_diff(&r.point().components(), &p.components()) <= REPRODUCE_TOL {
                        return Ok(Some(r));
                    }
                }
            }
        }
    }
    Ok(None)
}
