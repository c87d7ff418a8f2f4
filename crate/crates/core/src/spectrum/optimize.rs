use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector4};
use rayon::prelude::*;
use serde::Serialize;

use super::canonical::canonicalize_realization;
use super::operator::{bell_matrix_from, kron, observable, observable_derivative, top_eigenpair, top_eigenvalue};
use crate::error::{finite, ChshError, Result};
use crate::model::{ProbabilityPoint, Realization};
use crate::polytope::Functional;

/// Two candidates closer than this in angle space count as the same optimum.
const SAME_POINT: f64 = 1e-3;
/// Value tolerance when comparing candidate optima.
const VALUE_TIE: f64 = 1e-7;
const DEGENERATE_GAP: f64 = 1e-9;
const FD_STEP: f64 = 1e-5;
const MAX_ITER: usize = 200;
/// Longest refinement step, in radians.
const MAX_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaximizeOptions {
    /// Grid points per axis, inclusive of both ends of `[0, π]`.
    pub grid_n: usize,
    /// Refinement stops once a step is shorter than this.
    pub refine_tol: f64,
    /// Number of grid local maxima that get refined.
    pub max_seeds: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            grid_n: 64,
            refine_tol: 1e-10,
            max_seeds: 8,
        }
    }
}

/// Best quantum value of a functional over the aligned angle box `[0, π]²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumMaximum {
    pub beta_max: f64,
    pub a_star: f64,
    pub b_star: f64,
    pub eigenvector: [f64; 4],
    pub spectral_gap: f64,
    pub realization: Realization,
    pub point: ProbabilityPoint,
    /// No other optimum within `1e-7` of `beta_max`, and the top eigenvalue
    /// is simple.
    pub unique: bool,
    /// The optimum (or a tie) lies on the edge of the angle box.
    pub boundary: bool,
}

impl QuantumMaximum {
    pub fn require_interior(&self) -> Result<&Self> {
        if self.boundary {
            Err(ChshError::BoundaryOptimum {
                a: self.a_star,
                b: self.b_star,
                beta: self.beta_max,
            })
        } else {
            Ok(self)
        }
    }
}

pub fn maximize_quantum_value(f: &Functional, grid_n: usize, refine_tol: f64) -> Result<QuantumMaximum> {
    maximize_with(
        f,
        &MaximizeOptions {
            grid_n,
            refine_tol,
            ..MaximizeOptions::default()
        },
    )
}

/// Grid search followed by projected Newton refinement of the most
/// promising local maxima.  Gradients come from the Hellmann-Feynman
/// theorem, Hessians from finite differences of the gradient.
pub fn maximize_with(f: &Functional, opts: &MaximizeOptions) -> Result<QuantumMaximum> {
    if opts.grid_n < 8 {
        return Err(ChshError::OutOfRange {
            name: "grid_n",
            value: opts.grid_n as f64,
            range: "[8, inf)",
        });
    }
    finite("refine_tol", opts.refine_tol)?;
    if opts.refine_tol <= 0.0 {
        return Err(ChshError::OutOfRange {
            name: "refine_tol",
            value: opts.refine_tol,
            range: "(0, inf)",
        });
    }
    let obj = Objective::new(f);
    let n = opts.grid_n;
    let step = PI / (n - 1) as f64;
    let obs: Vec<Matrix2<f64>> = (0..n).map(|i| observable(i as f64 * step)).collect();
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| obj.value_with(&obs[k / n], &obs[k % n]))
        .collect();
    let at = |i: usize, j: usize| values[i * n + j];

    let mut local: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            let is_max = neighbours(i, j, n).all(|(p, q)| at(p, q) <= v);
            if is_max {
                local.push((v, i, j));
            }
        }
    }
    local.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut seeds: Vec<(usize, usize)> = local.iter().take(opts.max_seeds).map(|&(_, i, j)| (i, j)).collect();
    let on_edge = |i: usize, j: usize| i == 0 || j == 0 || i == n - 1 || j == n - 1;
    let best_of = |pred: &dyn Fn(usize, usize) -> bool| {
        (0..n * n)
            .filter(|&k| pred(k / n, k % n))
            .max_by(|&p, &q| values[p].total_cmp(&values[q]))
            .map(|k| (k / n, k % n))
    };
    let best_edge = best_of(&on_edge).unwrap();
    let edge_value = at(best_edge.0, best_edge.1);
    let extra = [Some(best_edge), best_of(&|i, j| !on_edge(i, j))];
    for s in extra.into_iter().flatten() {
        if !seeds.contains(&s) {
            seeds.push(s);
        }
    }

    let mut candidates: Vec<(f64, [f64; 2])> = seeds
        .iter()
        .map(|&(i, j)| obj.refine([i as f64 * step, j as f64 * step], opts.refine_tol))
        .collect();
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (beta_max, best) = candidates[0];
    let at_bound = |x: &[f64; 2]| x.iter().any(|&t| t <= 1e-12 || t >= PI - 1e-12);
    let far = |x: &[f64; 2]| ((x[0] - best[0]).powi(2) + (x[1] - best[1]).powi(2)).sqrt() > SAME_POINT;
    let tied: Vec<&(f64, [f64; 2])> = candidates.iter().filter(|c| c.0 >= beta_max - VALUE_TIE).collect();
    let boundary = at_bound(&best) || tied.iter().any(|c| at_bound(&c.1)) || edge_value >= beta_max - VALUE_TIE;

    let w = obj.matrix(best[0], best[1]);
    let (pair, gap) = top_eigenpair(&w);
    let unique = gap > DEGENERATE_GAP && !tied.iter().any(|c| far(&c.1));
    let realization = canonicalize_realization(&pair.vector, best[0], best[1])?;
    Ok(QuantumMaximum {
        beta_max,
        a_star: best[0],
        b_star: best[1],
        eigenvector: pair.vector,
        spectral_gap: gap,
        point: realization.point(),
        realization,
        unique,
        boundary,
    })
}

fn neighbours(i: usize, j: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    let range = move |k: usize| k.saturating_sub(1)..=(k + 1).min(n - 1);
    range(i)
        .flat_map(move |p| range(j).map(move |q| (p, q)))
        .filter(move |&(p, q)| (p, q) != (i, j))
}

struct Objective {
    f: Functional,
    a0: Matrix2<f64>,
}

impl Objective {
    fn new(f: &Functional) -> Self {
        Self {
            f: *f,
            a0: observable(0.0),
        }
    }

    fn value_with(&self, a1: &Matrix2<f64>, b1: &Matrix2<f64>) -> f64 {
        top_eigenvalue(&bell_matrix_from(&self.f, &[self.a0, *a1], &[self.a0, *b1]))
    }

    fn matrix(&self, a: f64, b: f64) -> Matrix4<f64> {
        bell_matrix_from(&self.f, &[self.a0, observable(a)], &[self.a0, observable(b)])
    }

    fn value(&self, x: [f64; 2]) -> f64 {
        top_eigenvalue(&self.matrix(x[0], x[1]))
    }

    /// Hellmann-Feynman gradient of the top eigenvalue.
    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let c = self.f.coeffs();
        let (pair, _) = top_eigenpair(&self.matrix(x[0], x[1]));
        let v = Vector4::from(pair.vector);
        let id = Matrix2::identity();
        let (a1, b1) = (observable(x[0]), observable(x[1]));
        let (da, db) = (observable_derivative(x[0]), observable_derivative(x[1]));
        let dwa = kron(&da, &id) * c[1] + kron(&da, &self.a0) * c[6] + kron(&da, &b1) * c[7];
        let dwb = kron(&id, &db) * c[3] + kron(&self.a0, &db) * c[5] + kron(&a1, &db) * c[7];
        [v.dot(&(dwa * v)), v.dot(&(dwb * v))]
    }

    fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut lo = x;
            let mut hi = x;
            hi[k] = (x[k] + FD_STEP).min(PI);
            lo[k] = (x[k] - FD_STEP).max(0.0);
            let (gl, gh) = (self.gradient(lo), self.gradient(hi));
            for r in 0..2 {
                h[r][k] = (gh[r] - gl[r]) / (hi[k] - lo[k]);
            }
        }
        let off = (h[0][1] + h[1][0]) / 2.0;
        h[0][1] = off;
        h[1][0] = off;
        h
    }

    /// Monotone projected Newton ascent on the box `[0, π]²`.
    fn refine(&self, mut x: [f64; 2], tol: f64) -> (f64, [f64; 2]) {
        let mut fx = self.value(x);
        for _ in 0..MAX_ITER {
            let g = self.gradient(x);
            let free: [bool; 2] = std::array::from_fn(|k| !((x[k] <= 0.0 && g[k] < 0.0) || (x[k] >= PI && g[k] > 0.0)));
            let gf: [f64; 2] = std::array::from_fn(|k| if free[k] { g[k] } else { 0.0 });
            let gnorm = gf[0].hypot(gf[1]);
            if gnorm < 1e-15 {
                break;
            }
            let h = self.hessian(x);
            let Some(mut d) = newton_direction(&h, &gf, free) else {
                break;
            };
            let len = d[0].hypot(d[1]);
            if len > MAX_STEP {
                d = [d[0] * MAX_STEP / len, d[1] * MAX_STEP / len];
            }
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..50 {
                let xn = [(x[0] + t * d[0]).clamp(0.0, PI), (x[1] + t * d[1]).clamp(0.0, PI)];
                let fnew = self.value(xn);
                if fnew >= fx {
                    accepted = Some((xn, fnew));
                    break;
                }
                t /= 2.0;
            }
            let Some((xn, fnew)) = accepted else { break };
            let moved = (xn[0] - x[0]).hypot(xn[1] - x[1]);
            x = xn;
            fx = fnew;
            if moved < tol {
                break;
            }
        }
        (fx, x)
    }
}

/// Newton step restricted to free coordinates. An indefinite Hessian is
/// shifted until it is safely negative definite, so the step stays an
/// ascent direction whose length follows the curvature.
fn newton_direction(h: &[[f64; 2]; 2], g: &[f64; 2], free: [bool; 2]) -> Option<[f64; 2]> {
    match free {
        [true, true] => {
            let mean = (h[0][0] + h[1][1]) / 2.0;
            let spread = ((h[0][0] - h[1][1]) / 2.0).hypot(h[0][1]);
            let (top, bottom) = (mean + spread, mean - spread);
            let floor = 1e-3 * bottom.abs().max(1.0);
            let shift = if top < -floor { 0.0 } else { top + floor };
            let (p, q, r) = (h[0][0] - shift, h[0][1], h[1][1] - shift);
            let det = p * r - q * q;
            Some([-(r * g[0] - q * g[1]) / det, -(-q * g[0] + p * g[1]) / det])
        }
        [true, false] => Some([-g[0] / h[0][0].min(-1e-3), 0.0]),
        [false, true] => Some([0.0, -g[1] / h[1][1].min(-1e-3)]),
        _ => None,
    }
}
