use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use serde::Serialize;

use crate::error::{finite, Result};
use crate::polytope::Functional;

/// How the two free angles `(a, b)` place the observables in the X-Z plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// `A0 = B0 = Z`, `A1` at angle `a`, `B1` at angle `b`.
    #[default]
    Aligned,
    /// `A0, A1` at `±a/2`, `B0 = Z`, `B1` at angle `b`.
    Symmetric,
}

impl Frame {
    /// Bloch angles `([α0, α1], [β0, β1])` of the four observables.
    pub fn observable_angles(self, a: f64, b: f64) -> ([f64; 2], [f64; 2]) {
        match self {
            Frame::Aligned => ([0.0, a], [0.0, b]),
            Frame::Symmetric => ([a / 2.0, -a / 2.0], [0.0, b]),
        }
    }
}

/// The Bell operator `W = Σ F_i O_i` of a functional for fixed measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct BellOperator {
    pub functional: Functional,
    pub alice: [f64; 2],
    pub bob: [f64; 2],
    pub matrix: Matrix4<f64>,
}

/// Eigenvalue and unit eigenvector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: [f64; 4],
}

/// `cos t Z + sin t X`.
pub fn observable(t: f64) -> Matrix2<f64> {
    let (s, c) = t.sin_cos();
    Matrix2::new(c, s, s, -c)
}

/// Derivative of [`observable`] with respect to `t`.
pub fn observable_derivative(t: f64) -> Matrix2<f64> {
    let (s, c) = t.sin_cos();
    Matrix2::new(-s, c, c, s)
}

/// Kronecker product; Alice is the first factor, basis index `2·alice + bob`.
pub fn kron(p: &Matrix2<f64>, q: &Matrix2<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| p[(r / 2, c / 2)] * q[(r % 2, c % 2)])
}

/// `W` for observables at arbitrary Bloch angles.
pub fn bell_matrix(f: &Functional, alice: [f64; 2], bob: [f64; 2]) -> Matrix4<f64> {
    let a = [observable(alice[0]), observable(alice[1])];
    let b = [observable(bob[0]), observable(bob[1])];
    bell_matrix_from(f, &a, &b)
}

pub(crate) fn bell_matrix_from(f: &Functional, a: &[Matrix2<f64>; 2], b: &[Matrix2<f64>; 2]) -> Matrix4<f64> {
    let c = f.coeffs();
    let id = Matrix2::identity();
    let mut w = kron(&a[0], &id) * c[0] + kron(&a[1], &id) * c[1] + kron(&id, &b[0]) * c[2] + kron(&id, &b[1]) * c[3];
    for x in 0..2 {
        for y in 0..2 {
            w += kron(&a[x], &b[y]) * c[4 + 2 * x + y];
        }
    }
    w
}

/// Bell operator in the default aligned frame.
pub fn build_bell_operator(f: &Functional, a: f64, b: f64) -> Result<BellOperator> {
    build_bell_operator_in(f, a, b, Frame::Aligned)
}

pub fn build_bell_operator_in(f: &Functional, a: f64, b: f64, frame: Frame) -> Result<BellOperator> {
    finite("a", a)?;
    finite("b", b)?;
    let (alice, bob) = frame.observable_angles(a, b);
    Ok(BellOperator {
        functional: *f,
        alice,
        bob,
        matrix: bell_matrix(f, alice, bob),
    })
}

impl BellOperator {
    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> [f64; 4] {
        let mut v: Vec<f64> = self.matrix.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|x, y| y.total_cmp(x));
        [v[0], v[1], v[2], v[3]]
    }

    pub fn top_eigenpair(&self) -> EigenPair {
        top_eigenpair(&self.matrix).0
    }
}

/// Largest eigenpair and the gap to the second eigenvalue.  The eigenvector
/// sign is fixed by making its largest-magnitude entry positive.
pub fn top_eigenpair(w: &Matrix4<f64>) -> (EigenPair, f64) {
    let eig = SymmetricEigen::new(*w);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = order[0];
    let v: Vector4<f64> = eig.eigenvectors.column(top).into_owned();
    let pivot = v.iamax();
    let v = if v[pivot] < 0.0 { -v } else { v };
    let v = v / v.norm();
    (
        EigenPair {
            value: eig.eigenvalues[top],
            vector: [v[0], v[1], v[2], v[3]],
        },
        eig.eigenvalues[top] - eig.eigenvalues[order[1]],
    )
}

/// Largest eigenvalue only.
pub fn top_eigenvalue(w: &Matrix4<f64>) -> f64 {
    w.symmetric_eigenvalues().max()
}
