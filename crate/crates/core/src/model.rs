//! Canonical two-qubit realisations and the correlation vectors they produce.
//!
//! A realisation is the partially entangled state
//! `cos(θ/2)|00⟩ + sin(θ/2)|11⟩` together with four ±1-valued observables
//! `cos t Z + sin t X` in the X-Z plane.  Every extremal point of the
//! quantum set in the CHSH scenario can be reached this way.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{finite, ChshError, Result};

/// Probabilities below `-PROBABILITY_TOLERANCE` are rejected.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

const THETA_SLACK: f64 = 1e-12;

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// State angle and measurement angles of a canonical realisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRealization")]
pub struct Realization {
    theta: f64,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

#[derive(Deserialize)]
struct RawRealization {
    theta: f64,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl TryFrom<RawRealization> for Realization {
    type Error = ChshError;

    fn try_from(r: RawRealization) -> Result<Self> {
        Realization::new(r.theta, r.a0, r.a1, r.b0, r.b1)
    }
}

impl Realization {
    /// Builds a realisation with `θ ∈ [0, π/2]`; measurement angles are
    /// reduced mod 2π.
    pub fn new(theta: f64, a0: f64, a1: f64, b0: f64, b1: f64) -> Result<Self> {
        finite("theta", theta)?;
        for (name, v) in [("a0", a0), ("a1", a1), ("b0", b0), ("b1", b1)] {
            finite(name, v)?;
        }
        if !(-THETA_SLACK..=FRAC_PI_2 + THETA_SLACK).contains(&theta) {
            return Err(ChshError::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi/2]",
            });
        }
        Ok(Self {
            theta: theta.clamp(0.0, FRAC_PI_2),
            a0: normalize_angle(a0),
            a1: normalize_angle(a1),
            b0: normalize_angle(b0),
            b1: normalize_angle(b1),
        })
    }

    pub fn from_angles(theta: f64, angles: [f64; 4]) -> Result<Self> {
        Self::new(theta, angles[0], angles[1], angles[2], angles[3])
    }

    /// Accepts `θ ∈ [0, π]`.  For `θ > π/2` the equivalent realisation
    /// `(π - θ, π - a_x, π - b_y)` is returned; it yields the same point.
    pub fn with_state_angle(theta: f64, angles: [f64; 4]) -> Result<Self> {
        finite("theta", theta)?;
        if !(-THETA_SLACK..=PI + THETA_SLACK).contains(&theta) {
            return Err(ChshError::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if theta > FRAC_PI_2 {
            let [a0, a1, b0, b1] = angles;
            Self::new(PI - theta.min(PI), PI - a0, PI - a1, PI - b0, PI - b1)
        } else {
            Self::from_angles(theta, angles)
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn a(&self, x: usize) -> f64 {
        [self.a0, self.a1][x]
    }

    pub fn b(&self, y: usize) -> f64 {
        [self.b0, self.b1][y]
    }

    pub fn alice(&self) -> [f64; 2] {
        [self.a0, self.a1]
    }

    pub fn bob(&self) -> [f64; 2] {
        [self.b0, self.b1]
    }

    /// `[a0, a1, b0, b1]`.
    pub fn angles(&self) -> [f64; 4] {
        [self.a0, self.a1, self.b0, self.b1]
    }

    /// Same measurements, different state angle.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::from_angles(theta, self.angles())
    }

    pub fn point(&self) -> ProbabilityPoint {
        point_from_realization(self)
    }
}

/// The correlation vector of `r`.
pub fn point_from_realization(r: &Realization) -> ProbabilityPoint {
    ProbabilityPoint {
        components: point_components(r.theta, r.alice(), r.bob()),
    }
}

/// Components of the correlation vector for arbitrary (unchecked) angles.
pub fn point_components(theta: f64, alice: [f64; 2], bob: [f64; 2]) -> [f64; 8] {
    let (st, ct) = theta.sin_cos();
    let (sa0, ca0) = alice[0].sin_cos();
    let (sa1, ca1) = alice[1].sin_cos();
    let (sb0, cb0) = bob[0].sin_cos();
    let (sb1, cb1) = bob[1].sin_cos();
    let corr = |ca: f64, sa: f64, cb: f64, sb: f64| ca * cb + st * sa * sb;
    [
        ct * ca0,
        ct * ca1,
        ct * cb0,
        ct * cb1,
        corr(ca0, sa0, cb0, sb0),
        corr(ca0, sa0, cb1, sb1),
        corr(ca1, sa1, cb0, sb0),
        corr(ca1, sa1, cb1, sb1),
    ]
}

/// The symmetry `a_x → -a_x, b_y → -b_y`, which leaves the point unchanged.
pub fn sign_flip_symmetry(r: &Realization) -> Realization {
    Realization {
        theta: r.theta,
        a0: normalize_angle(-r.a0),
        a1: normalize_angle(-r.a1),
        b0: normalize_angle(-r.b0),
        b1: normalize_angle(-r.b1),
    }
}

/// An 8-component correlation vector
/// `(⟨A0⟩, ⟨A1⟩, ⟨B0⟩, ⟨B1⟩, ⟨A0B0⟩, ⟨A0B1⟩, ⟨A1B0⟩, ⟨A1B1⟩)`.
///
/// Construction checks that every probability `p(ab|xy)` is non-negative up
/// to [`PROBABILITY_TOLERANCE`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct ProbabilityPoint {
    components: [f64; 8],
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    marginals: [f64; 4],
    correlators: [f64; 4],
}

impl TryFrom<RawPoint> for ProbabilityPoint {
    type Error = ChshError;

    fn try_from(r: RawPoint) -> Result<Self> {
        ProbabilityPoint::new(r.marginals, r.correlators)
    }
}

impl From<ProbabilityPoint> for RawPoint {
    fn from(p: ProbabilityPoint) -> Self {
        RawPoint {
            marginals: p.marginals(),
            correlators: p.correlators(),
        }
    }
}

impl ProbabilityPoint {
    /// `marginals = (A0, A1, B0, B1)`, `correlators = (A0B0, A0B1, A1B0, A1B1)`.
    pub fn new(marginals: [f64; 4], correlators: [f64; 4]) -> Result<Self> {
        let mut c = [0.0; 8];
        c[..4].copy_from_slice(&marginals);
        c[4..].copy_from_slice(&correlators);
        Self::from_components(c)
    }

    pub fn from_components(components: [f64; 8]) -> Result<Self> {
        const NAMES: [&str; 8] = ["A0", "A1", "B0", "B1", "A0B0", "A0B1", "A1B0", "A1B1"];
        for (name, v) in NAMES.iter().zip(components) {
            finite(name, v)?;
        }
        let p = Self { components };
        for (a, b, x, y) in outcome_settings() {
            let v = p.probability(a, b, x, y);
            if v < -PROBABILITY_TOLERANCE {
                return Err(ChshError::NegativeProbability { a, b, x, y, value: v });
            }
        }
        Ok(p)
    }

    /// Skips the positivity check; for points known to be valid by
    /// construction (deterministic points, PR boxes).
    pub(crate) fn from_components_unchecked(components: [f64; 8]) -> Self {
        Self { components }
    }

    pub fn components(&self) -> [f64; 8] {
        self.components
    }

    pub fn marginals(&self) -> [f64; 4] {
        [
            self.components[0],
            self.components[1],
            self.components[2],
            self.components[3],
        ]
    }

    pub fn correlators(&self) -> [f64; 4] {
        [
            self.components[4],
            self.components[5],
            self.components[6],
            self.components[7],
        ]
    }

    pub fn alice(&self, x: usize) -> f64 {
        self.components[x]
    }

    pub fn bob(&self, y: usize) -> f64 {
        self.components[2 + y]
    }

    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.components[4 + 2 * x + y]
    }

    /// `p(ab|xy) = (1 + (-1)^a A_x + (-1)^b B_y + (-1)^{a+b} C_xy) / 4`.
    pub fn probability(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        let sa = sign(a);
        let sb = sign(b);
        (1.0 + sa * self.alice(x) + sb * self.bob(y) + sa * sb * self.correlator(x, y)) / 4.0
    }

    pub fn probabilities(&self) -> ProbabilityTable {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (a, b, x, y) in outcome_settings() {
            p[a][b][x][y] = self.probability(a, b, x, y);
        }
        ProbabilityTable { p }
    }

    /// Largest absolute component difference.
    pub fn distance(&self, other: &ProbabilityPoint) -> f64 {
        max_abs_diff(&self.components, &other.components)
    }

    pub fn dot(&self, coeffs: &[f64; 8]) -> f64 {
        dot8(&self.components, coeffs)
    }
}

/// Full table `p(ab|xy)` indexed `[a][b][x][y]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityTable {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

/// One entry of a serialised probability table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEntry {
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub y: usize,
    pub p: f64,
}

impl Serialize for ProbabilityTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl ProbabilityTable {
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[a][b][x][y]
    }

    /// Entries in `(x, y, a, b)` lexicographic order.
    pub fn entries(&self) -> Vec<ProbabilityEntry> {
        let mut out = Vec::with_capacity(16);
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        out.push(ProbabilityEntry {
                            a,
                            b,
                            x,
                            y,
                            p: self.p[a][b][x][y],
                        });
                    }
                }
            }
        }
        out
    }

    /// Recovers the correlation vector.  Marginals are read off the `y = 0`
    /// and `x = 0` blocks.
    pub fn to_point(&self) -> Result<ProbabilityPoint> {
        let mut c = [0.0; 8];
        for x in 0..2 {
            c[x] = (0..2).map(|b| self.p[0][b][x][0] - self.p[1][b][x][0]).sum();
        }
        for y in 0..2 {
            c[2 + y] = (0..2).map(|a| self.p[a][0][0][y] - self.p[a][1][0][y]).sum();
        }
        for x in 0..2 {
            for y in 0..2 {
                c[4 + 2 * x + y] = (0..2)
                    .flat_map(|a| (0..2).map(move |b| (a, b)))
                    .map(|(a, b)| sign(a) * sign(b) * self.p[a][b][x][y])
                    .sum();
            }
        }
        ProbabilityPoint::from_components(c)
    }

    /// Largest `|Σ_ab p(ab|xy) - 1|`.
    pub fn normalization_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                let s: f64 = (0..2)
                    .flat_map(|a| (0..2).map(move |b| (a, b)))
                    .map(|(a, b)| self.p[a][b][x][y])
                    .sum();
                worst = worst.max((s - 1.0).abs());
            }
        }
        worst
    }

    /// Largest violation of the no-signalling constraints.
    pub fn no_signalling_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..2 {
            for a in 0..2 {
                let m = |y: usize| self.p[a][0][x][y] + self.p[a][1][x][y];
                worst = worst.max((m(0) - m(1)).abs());
            }
        }
        for y in 0..2 {
            for b in 0..2 {
                let m = |x: usize| self.p[0][b][x][y] + self.p[1][b][x][y];
                worst = worst.max((m(0) - m(1)).abs());
            }
        }
        worst
    }
}

pub(crate) fn outcome_settings() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|i| ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1))
}

pub(crate) fn sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn dot8(u: &[f64; 8], v: &[f64; 8]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn max_abs_diff(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn chsh_optimal() -> Realization {
        Realization::new(FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4).unwrap()
    }

    #[test]
    fn chsh_optimal_point() {
        let p = chsh_optimal().point();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [0.0, 0.0, 0.0, 0.0, h, h, h, -h];
        assert!(max_abs_diff(&p.components(), &want) < 1e-15);
    }

    #[test]
    fn product_state_point() {
        let p = Realization::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap().point();
        assert_eq!(p.components(), [1.0; 8]);
    }

    #[test]
    fn theta_range_is_checked() {
        assert!(Realization::new(2.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(Realization::new(-0.1, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(Realization::new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn angles_are_normalized() {
        let r = Realization::new(0.3, -FRAC_PI_2, 7.0, TAU, 0.0).unwrap();
        assert!((r.a(0) - 3.0 * FRAC_PI_2).abs() < 1e-15);
        assert!((r.a(1) - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(r.b(0), 0.0);
        assert_eq!(normalize_angle(-1e-20), 0.0);
    }

    #[test]
    fn negative_probability_is_rejected() {
        let err = ProbabilityPoint::new([1.0, 0.0, -1.0, 0.0], [1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(err, Err(ChshError::NegativeProbability { .. })));
    }

    #[test]
    fn state_angle_reflection_keeps_point() {
        let angles = [0.4, -0.4, 0.0, FRAC_PI_2];
        let theta = 2.2;
        let r = Realization::with_state_angle(theta, angles).unwrap();
        assert!(r.theta() <= FRAC_PI_2);
        let direct = point_components(theta, [angles[0], angles[1]], [angles[2], angles[3]]);
        assert!(max_abs_diff(&r.point().components(), &direct) < 1e-14);
    }

    #[test]
    fn serde_shapes() {
        let r = chsh_optimal();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"theta\""));
        let back: Realization = serde_json::from_str(&s).unwrap();
        assert!(max_abs_diff(&back.angles(), &r.angles()) < 1e-15);
        let p = r.point();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"marginals\"") && s.contains("\"correlators\""));
        let back: ProbabilityPoint = serde_json::from_str(&s).unwrap();
        assert!(back.distance(&p) < 1e-15);
        let table = serde_json::to_value(p.probabilities()).unwrap();
        assert_eq!(table.as_array().unwrap().len(), 16);
        assert!(serde_json::from_str::<Realization>(r#"{"theta":3.0,"a0":0,"a1":0,"b0":0,"b1":0}"#).is_err());
    }

    fn realization() -> impl Strategy<Value = Realization> {
        (0.0..=FRAC_PI_2, 0.0..TAU, 0.0..TAU, 0.0..TAU, 0.0..TAU)
            .prop_map(|(t, a0, a1, b0, b1)| Realization::new(t, a0, a1, b0, b1).unwrap())
    }

    proptest! {
        #[test]
        fn probabilities_are_valid(r in realization()) {
            let table = r.point().probabilities();
            for e in table.entries() {
                prop_assert!(e.p >= -1e-12 && e.p <= 1.0 + 1e-12);
            }
            prop_assert!(table.normalization_residual() < 1e-12);
            prop_assert!(table.no_signalling_residual() < 1e-12);
        }

        #[test]
        fn table_round_trip(r in realization()) {
            let p = r.point();
            let back = p.probabilities().to_point().unwrap();
            prop_assert!(back.distance(&p) < 1e-12);
        }

        #[test]
        fn sign_flip_preserves_point(r in realization()) {
            let q = sign_flip_symmetry(&r);
            prop_assert!(q.point().distance(&r.point()) < 1e-12);
        }

        #[test]
        fn components_bounded(r in realization()) {
            for c in r.point().components() {
                prop_assert!(c.abs() <= 1.0 + 1e-12);
            }
        }
    }
}
