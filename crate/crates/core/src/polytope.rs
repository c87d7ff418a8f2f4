//! Linear functionals, the local polytope and the no-signalling polytope.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{finite, Result};
use crate::model::{dot8, outcome_settings, sign, ProbabilityPoint};

/// Threshold above which a CHSH expression counts as a Bell violation.
pub const NONLOCALITY_TOLERANCE: f64 = 1e-9;

/// A Bell functional `F·P` over the 8 correlation components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunctional", into = "RawFunctional")]
pub struct Functional {
    coeffs: [f64; 8],
}

#[derive(Serialize, Deserialize)]
struct RawFunctional {
    coeffs: [f64; 8],
}

impl TryFrom<RawFunctional> for Functional {
    type Error = crate::ChshError;

    fn try_from(r: RawFunctional) -> Result<Self> {
        Functional::new(r.coeffs)
    }
}

impl From<Functional> for RawFunctional {
    fn from(f: Functional) -> Self {
        RawFunctional { coeffs: f.coeffs }
    }
}

impl Functional {
    pub fn new(coeffs: [f64; 8]) -> Result<Self> {
        for c in coeffs {
            finite("functional coefficient", c)?;
        }
        Ok(Self { coeffs })
    }

    /// `A0B0 + A0B1 + A1B0 - A1B1`.
    pub fn chsh() -> Self {
        Self {
            coeffs: [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0],
        }
    }

    pub fn coeffs(&self) -> [f64; 8] {
        self.coeffs
    }

    pub fn value(&self, p: &ProbabilityPoint) -> f64 {
        p.dot(&self.coeffs)
    }

    pub fn value_components(&self, c: &[f64; 8]) -> f64 {
        dot8(&self.coeffs, c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

/// Maximal values of a functional over the three nested sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalValues {
    pub beta_l: f64,
    pub beta_ns: f64,
    pub beta_q: Option<f64>,
    /// Indices into [`deterministic_points`] attaining `beta_l`.
    pub maximizers: Vec<usize>,
}

/// Correlation vector of the deterministic strategy with outputs
/// `(c0, c1)` for Alice and `(d0, d1)` for Bob.
pub fn deterministic_components(c: [f64; 2], d: [f64; 2]) -> [f64; 8] {
    [
        c[0],
        c[1],
        d[0],
        d[1],
        c[0] * d[0],
        c[0] * d[1],
        c[1] * d[0],
        c[1] * d[1],
    ]
}

/// The 16 local deterministic points, indexed by binary counting over
/// `(c0, c1, d0, d1)` with `c0` the most significant bit and `+1 ↦ 0`.
pub fn deterministic_points() -> &'static [ProbabilityPoint; 16] {
    static POINTS: OnceLock<[ProbabilityPoint; 16]> = OnceLock::new();
    POINTS.get_or_init(|| {
        std::array::from_fn(|i| {
            let bit = |k: usize| sign((i >> k) & 1);
            ProbabilityPoint::from_components_unchecked(deterministic_components([bit(3), bit(2)], [bit(1), bit(0)]))
        })
    })
}

/// Index of a deterministic correlation vector, if `c` is one.
pub fn deterministic_index(c: &[f64; 8]) -> Option<usize> {
    deterministic_points().iter().position(|p| p.components() == *c)
}

/// The 8 PR boxes: zero marginals, `C_xy = (-1)^(xy ⊕ αx ⊕ βy ⊕ γ)`.
pub fn pr_boxes() -> &'static [ProbabilityPoint; 8] {
    static POINTS: OnceLock<[ProbabilityPoint; 8]> = OnceLock::new();
    POINTS.get_or_init(|| {
        std::array::from_fn(|i| {
            let (al, be, ga) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
            let mut c = [0.0; 8];
            for x in 0..2 {
                for y in 0..2 {
                    c[4 + 2 * x + y] = sign((x * y) ^ (al * x) ^ (be * y) ^ ga);
                }
            }
            ProbabilityPoint::from_components_unchecked(c)
        })
    })
}

/// Local bound, no-signalling bound and the local maximisers of `f`.
pub fn local_value(f: &Functional) -> FunctionalValues {
    let values: Vec<f64> = deterministic_points().iter().map(|p| f.value(p)).collect();
    let beta_l = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = 1e-12 * beta_l.abs().max(1.0);
    let maximizers = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= beta_l - scale)
        .map(|(i, _)| i)
        .collect();
    FunctionalValues {
        beta_l,
        beta_ns: nonsignalling_value(f),
        beta_q: None,
        maximizers,
    }
}

/// Maximum of `f` over the no-signalling polytope (its 24 vertices).
pub fn nonsignalling_value(f: &Functional) -> f64 {
    deterministic_points()
        .iter()
        .chain(pr_boxes().iter())
        .map(|p| f.value(p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Label of the positivity facet `p(ab|xy) ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetLabel {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub y: usize,
}

/// Values `p(ab|xy)` in facet order (`a, b, x, y` binary, `a` most significant).
pub fn facet_residuals(p: &ProbabilityPoint) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (i, (a, b, x, y)) in outcome_settings().enumerate() {
        out[i] = p.probability(a, b, x, y);
    }
    out
}

/// Positivity facets on which `p` lies, within `tol`.
pub fn touched_facets(p: &ProbabilityPoint, tol: f64) -> Vec<FacetLabel> {
    outcome_settings()
        .filter(|&(a, b, x, y)| p.probability(a, b, x, y) <= tol)
        .map(|(a, b, x, y)| FacetLabel { a, b, x, y })
        .collect()
}

/// The eight CHSH expressions: the minus sign on each of the four
/// correlators, taken with both overall signs.
pub fn chsh_values(p: &ProbabilityPoint) -> [f64; 8] {
    let c = p.correlators();
    let total: f64 = c.iter().sum();
    std::array::from_fn(|i| {
        let k = i % 4;
        let v = total - 2.0 * c[k];
        if i < 4 {
            v
        } else {
            -v
        }
    })
}

pub fn max_chsh(p: &ProbabilityPoint) -> f64 {
    chsh_values(p).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// True when some CHSH inequality is violated by more than
/// [`NONLOCALITY_TOLERANCE`].
pub fn is_nonlocal(p: &ProbabilityPoint) -> bool {
    max_chsh(p) > 2.0 + NONLOCALITY_TOLERANCE
}

/// Relabeling of inputs and outputs acting on correlation vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relabel {
    SwapAlice,
    SwapBob,
    FlipAlice(usize),
    FlipBob(usize),
}

impl Relabel {
    /// Each relabeling is an involution.
    pub fn apply(self, c: &[f64; 8]) -> [f64; 8] {
        let mut out = *c;
        match self {
            Relabel::SwapAlice => {
                out.swap(0, 1);
                out.swap(4, 6);
                out.swap(5, 7);
            }
            Relabel::SwapBob => {
                out.swap(2, 3);
                out.swap(4, 5);
                out.swap(6, 7);
            }
            Relabel::FlipAlice(x) => {
                out[x] = -out[x];
                out[4 + 2 * x] = -out[4 + 2 * x];
                out[5 + 2 * x] = -out[5 + 2 * x];
            }
            Relabel::FlipBob(y) => {
                out[2 + y] = -out[2 + y];
                out[4 + y] = -out[4 + y];
                out[6 + y] = -out[6 + y];
            }
        }
        out
    }
}

pub fn apply_relabels(ops: &[Relabel], c: &[f64; 8]) -> [f64; 8] {
    ops.iter().fold(*c, |acc, op| op.apply(&acc))
}

pub fn undo_relabels(ops: &[Relabel], c: &[f64; 8]) -> [f64; 8] {
    ops.iter().rev().fold(*c, |acc, op| op.apply(&acc))
}

/// Convex decomposition into deterministic points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalDecomposition {
    pub vertex_indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl LocalDecomposition {
    pub fn reconstruct(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for (&i, &w) in self.vertex_indices.iter().zip(&self.weights) {
            for (o, c) in out.iter_mut().zip(deterministic_points()[i].components()) {
                *o += w * c;
            }
        }
        out
    }
}

/// Explicit local model for points of the form
/// `(1, A1, 1, B1, 1, B1, A1, 1 - |A1 - B1|)`, the tangent-line
/// intersection used by the degenerate-threshold witness.  Returns `None`
/// when `p` is not of that form.
pub fn local_decomposition_witness(p: &[f64; 8]) -> Option<LocalDecomposition> {
    const TOL: f64 = 1e-10;
    let (ca, cb) = (p[1], p[3]);
    let expected = [1.0, ca, 1.0, cb, 1.0, cb, ca, 1.0 - (ca - cb).abs()];
    if expected.iter().zip(p).any(|(e, v)| (e - v).abs() > TOL) {
        return None;
    }
    if ca.abs() > 1.0 + TOL || cb.abs() > 1.0 + TOL {
        return None;
    }
    let (vertex_indices, weights) = if ca >= cb {
        (vec![0, 1, 5], vec![(1.0 + cb) / 2.0, (ca - cb) / 2.0, (1.0 - ca) / 2.0])
    } else {
        (vec![0, 4, 5], vec![(1.0 + ca) / 2.0, (cb - ca) / 2.0, (1.0 - cb) / 2.0])
    };
    Some(LocalDecomposition {
        vertex_indices,
        weights,
    })
}
