use nalgebra::{Complex, Matrix2};

use super::operator::{observable, Frame};
use crate::error::{ChshError, Result};
use crate::model::Realization;

const NORM_TOL: f64 = 1e-9;

/// Rotates a real two-qubit state and its observables into canonical form.
///
/// The state `v` (basis index `2·alice + bob`) is brought to Schmidt form
/// `cos(θ/2)|00⟩ + sin(θ/2)|11⟩` by local orthogonal maps; the observables
/// at `(a, b)` in the aligned frame follow along.
pub fn canonicalize_realization(v: &[f64; 4], a: f64, b: f64) -> Result<Realization> {
    let (alice, bob) = Frame::Aligned.observable_angles(a, b);
    canonicalize_state(v, alice, bob)
}

/// As [`canonicalize_realization`] for observables at arbitrary Bloch angles.
pub fn canonicalize_state(v: &[f64; 4], alice: [f64; 2], bob: [f64; 2]) -> Result<Realization> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(ChshError::NotNormalized(norm));
    }
    let m = Matrix2::new(v[0], v[1], v[2], v[3]) / norm;
    let svd = m.svd(true, true);
    let (mut u, mut vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut s = svd.singular_values;
    if s[0] < s[1] {
        s.swap_rows(0, 1);
        u.swap_columns(0, 1);
        vt.swap_rows(0, 1);
    }
    let theta = 2.0 * s[1].atan2(s[0]);
    // Alice rotates by Uᵀ, Bob by Vᵀ; observables transform as O·M·Oᵀ.
    let rotate = |o: &Matrix2<f64>, t: f64| {
        let m = o * observable(t) * o.transpose();
        m[(0, 1)].atan2(m[(0, 0)])
    };
    let ua = u.transpose();
    let ub = vt;
    Realization::new(
        theta.min(std::f64::consts::FRAC_PI_2),
        rotate(&ua, alice[0]),
        rotate(&ua, alice[1]),
        rotate(&ub, bob[0]),
        rotate(&ub, bob[1]),
    )
}

/// Complex-input variant: removes the global phase and rejects states with
/// residual imaginary content above `1e-9`.
pub fn canonicalize_complex(v: &[Complex<f64>; 4], a: f64, b: f64) -> Result<Realization> {
    let pivot = (0..4).max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())).unwrap();
    let phase = if v[pivot].norm() > 0.0 {
        v[pivot].conj() / v[pivot].norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let rotated: Vec<Complex<f64>> = v.iter().map(|z| z * phase).collect();
    let imag = rotated.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > NORM_TOL {
        return Err(ChshError::ComplexEigenvector(imag));
    }
    canonicalize_realization(&[rotated[0].re, rotated[1].re, rotated[2].re, rotated[3].re], a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::operator::kron;
    use nalgebra::{Matrix4, Vector4};
    use proptest::prelude::*;

    /// Direct expectation values `⟨v| O |v⟩` as an independent oracle.
    fn direct_point(v: &[f64; 4], alice: [f64; 2], bob: [f64; 2]) -> [f64; 8] {
        let v = Vector4::from(*v);
        let id = Matrix2::identity();
        let ev = |m: Matrix4<f64>| v.dot(&(m * v));
        let a = [observable(alice[0]), observable(alice[1])];
        let b = [observable(bob[0]), observable(bob[1])];
        [
            ev(kron(&a[0], &id)),
            ev(kron(&a[1], &id)),
            ev(kron(&id, &b[0])),
            ev(kron(&id, &b[1])),
            ev(kron(&a[0], &b[0])),
            ev(kron(&a[0], &b[1])),
            ev(kron(&a[1], &b[0])),
            ev(kron(&a[1], &b[1])),
        ]
    }

    #[test]
    fn already_canonical() {
        let t: f64 = 0.8;
        let v = [(t / 2.0).cos(), 0.0, 0.0, (t / 2.0).sin()];
        let r = canonicalize_realization(&v, 1.0, 2.0).unwrap();
        assert!((r.theta() - t).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            canonicalize_realization(&[1.0, 1.0, 0.0, 0.0], 0.0, 0.0),
            Err(ChshError::NotNormalized(_))
        ));
    }

    #[test]
    fn complex_phase_is_removed() {
        let ph = Complex::from_polar(1.0, 0.7);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [ph * s, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), ph * s];
        let r = canonicalize_complex(&v, 0.5, 1.5).unwrap();
        assert!((r.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let bad = [
            Complex::new(s, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, s),
        ];
        assert!(matches!(
            canonicalize_complex(&bad, 0.5, 1.5),
            Err(ChshError::ComplexEigenvector(_))
        ));
    }

    proptest! {
        #[test]
        fn canonical_form_reproduces_expectations(
            raw in prop::array::uniform4(-1.0f64..1.0),
            a in 0.0f64..std::f64::consts::PI,
            b in 0.0f64..std::f64::consts::PI,
        ) {
            let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(n > 1e-3);
            let v = raw.map(|x| x / n);
            let r = canonicalize_realization(&v, a, b).unwrap();
            let want = direct_point(&v, [0.0, a], [0.0, b]);
            let got = r.point().components();
            for (g, w) in got.iter().zip(want) {
                prop_assert!((g - w).abs() < 1e-12);
            }
        }
    }
}
