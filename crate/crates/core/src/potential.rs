//! Floating-point evaluation of the Newtonian potential, the moment of
//! inertia, the configuration measure and the λ residual system.
//!
//! All masses equal `MASS = 1`. At a central configuration every body
//! satisfies `λ q_i = m Σ_{j≠i} (q_i - q_j)/r_ij³`, so each non-vanishing
//! coordinate yields one λ value and the nine of them must coincide, while
//! the y-equation of body 1 (which sits on the x-axis) must vanish.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{
    close_center_of_mass, in_domain, mutual_distances, positions, FreePoint, ModelError,
    Positions, StarRadii,
};

pub const MASS: f64 = 1.0;

/// Names one λ function: a body `1..=5` and a coordinate `1 (x)` or `2 (y)`.
///
/// `(1, 2)` is not a λ function: `q_12 = 0`, and its equation is the
/// separate [`y1_residual`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LambdaIndex {
    body: u8,
    component: u8,
}

impl LambdaIndex {
    pub const ALL: [LambdaIndex; 9] = [
        LambdaIndex::raw(1, 1),
        LambdaIndex::raw(2, 1),
        LambdaIndex::raw(2, 2),
        LambdaIndex::raw(3, 1),
        LambdaIndex::raw(3, 2),
        LambdaIndex::raw(4, 1),
        LambdaIndex::raw(4, 2),
        LambdaIndex::raw(5, 1),
        LambdaIndex::raw(5, 2),
    ];

    const fn raw(body: u8, component: u8) -> Self {
        LambdaIndex { body, component }
    }

    pub fn new(body: u8, component: u8) -> Result<Self, InvalidIndex> {
        if !(1..=5).contains(&body) || !(1..=2).contains(&component) || (body, component) == (1, 2)
        {
            return Err(InvalidIndex(format!("{body}{component}")));
        }
        Ok(LambdaIndex { body, component })
    }

    pub fn body(&self) -> u8 {
        self.body
    }

    pub fn component(&self) -> u8 {
        self.component
    }

    pub(crate) fn body_index(&self) -> usize {
        self.body as usize - 1
    }

    pub(crate) fn component_index(&self) -> usize {
        self.component as usize - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid λ index `{0}` (expected two digits ik with i in 1..=5, k in 1..=2, ik != 12)")]
pub struct InvalidIndex(pub String);

impl fmt::Debug for LambdaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ{}{}", self.body, self.component)
    }
}

impl fmt::Display for LambdaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ{}{}", self.body, self.component)
    }
}

impl FromStr for LambdaIndex {
    type Err = InvalidIndex;

    /// Accepts `31`, `l31` or `λ31`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim().trim_start_matches(['l', 'λ', 'L']);
        let bytes = digits.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(InvalidIndex(s.to_string()));
        }
        LambdaIndex::new(bytes[0] - b'0', bytes[1] - b'0').map_err(|_| InvalidIndex(s.to_string()))
    }
}

impl TryFrom<String> for LambdaIndex {
    type Error = InvalidIndex;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<LambdaIndex> for String {
    fn from(i: LambdaIndex) -> String {
        format!("{}{}", i.body, i.component)
    }
}

/// `U = Σ_{i<j} m_i m_j / r_ij`
pub fn potential_u(s: &StarRadii) -> Result<f64, ModelError> {
    potential_of_positions(&positions(s))
}

pub fn potential_of_positions(q: &Positions) -> Result<f64, ModelError> {
    let d = mutual_distances(q)?;
    let mut u = 0.0;
    for i in 0..5 {
        for j in (i + 1)..5 {
            u += MASS * MASS / d[i][j];
        }
    }
    Ok(u)
}

/// `I = ½ Σ m_i |q_i|²`
pub fn moment_i(s: &StarRadii) -> f64 {
    0.5 * s.0.iter().map(|r| MASS * r * r).sum::<f64>()
}

/// `(1/(4M)) Σ_{i<j} m_i m_j r_ij²` with `M` the total mass. For a
/// configuration centered at its center of mass this equals `I/2`.
pub fn moment_from_distances(q: &Positions) -> Result<f64, ModelError> {
    let d = mutual_distances(q)?;
    let total_mass = 5.0 * MASS;
    let mut sum = 0.0;
    for i in 0..5 {
        for j in (i + 1)..5 {
            sum += MASS * MASS * d[i][j] * d[i][j];
        }
    }
    Ok(sum / (4.0 * total_mass))
}

/// The configuration measure `I U²` of the closed star at `p`, with the
/// moment written through mutual distances, `(1/(4M)) Σ m_i m_j r_ij²`.
pub fn config_measure(p: FreePoint) -> Result<f64, ModelError> {
    let q = positions(&close_center_of_mass(p)?);
    let u = potential_of_positions(&q)?;
    Ok(moment_from_distances(&q)? * u * u)
}

const DENOMINATOR_EPS: f64 = 1e-12;

fn checked_positions(p: FreePoint) -> Result<Positions, ModelError> {
    if !in_domain(p) {
        return Err(ModelError::DomainError { r3: p.r3, r5: p.r5 });
    }
    Ok(positions(&close_center_of_mass(p)?))
}

fn summands_at(idx: LambdaIndex, q: &Positions) -> Result<[f64; 4], ModelError> {
    let d = mutual_distances(q)?;
    let (i, k) = (idx.body_index(), idx.component_index());
    let qik = q[i][k];
    if qik.abs() < DENOMINATOR_EPS {
        return Err(ModelError::NearZeroDenominator(i + 1, k + 1));
    }
    let mut out = [0.0; 4];
    for (slot, j) in (0..5).filter(|&j| j != i).enumerate() {
        out[slot] = MASS * (qik - q[j][k]) / (qik * d[i][j].powi(3));
    }
    Ok(out)
}

/// The four per-neighbour terms of `λ_ik`, in ascending order of the
/// neighbour index `j`.
pub fn lambda_summands(idx: LambdaIndex, p: FreePoint) -> Result<[f64; 4], ModelError> {
    summands_at(idx, &checked_positions(p)?)
}

/// `λ_ik(r3, r5) = (m / q_ik) Σ_{j≠i} (q_ik - q_jk) / r_ij³`
pub fn lambda_component(idx: LambdaIndex, p: FreePoint) -> Result<f64, ModelError> {
    let q = checked_positions(p)?;
    lambda_of_positions(idx, &q)
}

fn lambda_of_positions(idx: LambdaIndex, q: &Positions) -> Result<f64, ModelError> {
    let d = mutual_distances(q)?;
    let (i, k) = (idx.body_index(), idx.component_index());
    let qik = q[i][k];
    if qik.abs() < DENOMINATOR_EPS {
        return Err(ModelError::NearZeroDenominator(i + 1, k + 1));
    }
    let sum: f64 = (0..5)
        .filter(|&j| j != i)
        .map(|j| (qik - q[j][k]) / d[i][j].powi(3))
        .sum();
    Ok(MASS * sum / qik)
}

fn y1_of_positions(q: &Positions) -> Result<f64, ModelError> {
    let d = mutual_distances(q)?;
    Ok((1..5).map(|j| -q[j][1] / d[0][j].powi(3)).sum())
}

/// Numerator of the body-1 y-equation, `-Σ_{j≠1} q_j2 / r_1j³`.
pub fn y1_residual(p: FreePoint) -> Result<f64, ModelError> {
    y1_of_positions(&checked_positions(p)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualVector {
    pub lambda_values: BTreeMap<LambdaIndex, f64>,
    pub y1: f64,
    /// `max λ - min λ` over the nine values.
    pub pairwise_spread: f64,
}

impl ResidualVector {
    pub fn lambda(&self, idx: LambdaIndex) -> f64 {
        self.lambda_values[&idx]
    }
}

pub fn residual_vector(p: FreePoint) -> Result<ResidualVector, ModelError> {
    let q = checked_positions(p)?;
    let mut lambda_values = BTreeMap::new();
    for idx in LambdaIndex::ALL {
        lambda_values.insert(idx, lambda_of_positions(idx, &q)?);
    }
    let max = lambda_values.values().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = lambda_values.values().cloned().fold(f64::INFINITY, f64::min);
    Ok(ResidualVector {
        lambda_values,
        y1: y1_of_positions(&q)?,
        pairwise_spread: max - min,
    })
}

pub type Matrix2 = [[f64; 2]; 2];

/// Plain central-difference Hessian of the configuration measure with step
/// `h` in both coordinates.
pub fn hessian_central(p: FreePoint, h: f64) -> Result<Matrix2, ModelError> {
    let f = |dx: f64, dy: f64| config_measure(FreePoint::new(p.r3 + dx, p.r5 + dy));
    let f0 = f(0.0, 0.0)?;
    let fxx = (f(h, 0.0)? - 2.0 * f0 + f(-h, 0.0)?) / (h * h);
    let fyy = (f(0.0, h)? - 2.0 * f0 + f(0.0, -h)?) / (h * h);
    let fxy = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
    Ok([[fxx, fxy], [fxy, fyy]])
}

/// Richardson-extrapolated central-difference Hessian,
/// `(4 H(h/2) - H(h)) / 3`, accurate to `O(h⁴)`.
///
/// Fails with `DomainError` when the stencil leaves Ŝ.
pub fn hessian_measure(p: FreePoint, h: f64) -> Result<Matrix2, ModelError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(ModelError::DomainError { r3: p.r3, r5: p.r5 });
    }
    for (dx, dy) in [(h, h), (h, -h), (-h, h), (-h, -h)] {
        let s = FreePoint::new(p.r3 + dx, p.r5 + dy);
        if !in_domain(s) {
            return Err(ModelError::DomainError { r3: s.r3, r5: s.r5 });
        }
    }
    let coarse = hessian_central(p, h)?;
    let fine = hessian_central(p, h / 2.0)?;
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    Ok(out)
}

/// Central-difference gradient of the configuration measure, Richardson
/// extrapolated like [`hessian_measure`].
pub fn gradient_measure(p: FreePoint, h: f64) -> Result<[f64; 2], ModelError> {
    let f = |dx: f64, dy: f64| config_measure(FreePoint::new(p.r3 + dx, p.r5 + dy));
    let central = |h: f64| -> Result<[f64; 2], ModelError> {
        Ok([
            (f(h, 0.0)? - f(-h, 0.0)?) / (2.0 * h),
            (f(0.0, h)? - f(0.0, -h)?) / (2.0 * h),
        ])
    };
    let (coarse, fine) = (central(h)?, central(h / 2.0)?);
    Ok([0, 1].map(|i| (4.0 * fine[i] - coarse[i]) / 3.0))
}

pub fn det2(m: &Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Closed forms of the Hessian of the measure at the regular pentagon and
/// of its determinant: `(5/4)(25+13√5)`, `-(5/8)(25+13√5)`,
/// `(5/4)(5+7√5)` and `125(85+31√5)/32`.
pub fn pentagon_hessian_closed_form() -> (Matrix2, f64) {
    let s5 = 5f64.sqrt();
    let h11 = 1.25 * (25.0 + 13.0 * s5);
    let h12 = -0.625 * (25.0 + 13.0 * s5);
    let h22 = 1.25 * (5.0 + 7.0 * s5);
    ([[h11, h12], [h12, h22]], 125.0 * (85.0 + 31.0 * s5) / 32.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{golden_b, nz, positions_at};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn idx(s: &str) -> LambdaIndex {
        s.parse().unwrap()
    }

    fn pentagon() -> StarRadii {
        close_center_of_mass(FreePoint::PENTAGON).unwrap()
    }

    #[test]
    fn lambda_index_parsing() {
        assert_eq!(idx("31"), LambdaIndex::new(3, 1).unwrap());
        assert_eq!(idx("λ52"), LambdaIndex::new(5, 2).unwrap());
        assert!("12".parse::<LambdaIndex>().is_err());
        assert!("61".parse::<LambdaIndex>().is_err());
        assert!("3".parse::<LambdaIndex>().is_err());
        let json = serde_json::to_string(&idx("41")).unwrap();
        assert_eq!(json, "\"41\"");
        assert_eq!(serde_json::from_str::<LambdaIndex>(&json).unwrap(), idx("41"));
    }

    #[test]
    fn potential_of_pentagon_by_chord_lengths() {
        // Five short chords 2 sin 36° and five long chords 2 sin 72°.
        let direct = potential_u(&pentagon()).unwrap();
        let s36 = (PI / 5.0).sin();
        let s72 = (2.0 * PI / 5.0).sin();
        let closed = 5.0 / (2.0 * s36) + 5.0 / (2.0 * s72);
        assert!((direct - closed).abs() < 1e-13);
    }

    #[test]
    fn potential_scales_and_rotates() {
        let s = close_center_of_mass(FreePoint::new(0.8, 1.3)).unwrap();
        let u = potential_u(&s).unwrap();
        assert!((potential_u(&s.scaled(2.5)).unwrap() - u / 2.5).abs() < 1e-13);
        let th = crate::model::angles();
        let rotated = th.map(|t| t + 0.7);
        let q = positions_at(&s.0, &rotated);
        assert!((potential_of_positions(&q).unwrap() - u).abs() < 1e-13);
    }

    #[test]
    fn moment_of_inertia() {
        assert_eq!(moment_i(&pentagon()), 2.5);
        let s = close_center_of_mass(FreePoint::new(0.8, 1.3)).unwrap();
        assert!((moment_i(&s.scaled(3.0)) - 9.0 * moment_i(&s)).abs() < 1e-12);
        let b = golden_b();
        let p = FreePoint::new(b / 2.02, 1.0);
        let s = close_center_of_mass(p).unwrap();
        let expect = (1.0 + s.r(2).powi(2) + p.r3.powi(2) + s.r(4).powi(2) + 1.0) / 2.0;
        assert!((moment_i(&s) - expect).abs() < 1e-14);
    }

    #[test]
    fn distance_moment_is_half_the_polar_moment() {
        for p in [FreePoint::PENTAGON, FreePoint::new(0.4, 0.9), FreePoint::new(1.5, 2.0)] {
            let s = close_center_of_mass(p).unwrap();
            let m = moment_from_distances(&positions(&s)).unwrap();
            assert!((m - moment_i(&s) / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn config_measure_at_pentagon() {
        let s = pentagon();
        let u = potential_u(&s).unwrap();
        let expect = moment_i(&s) / 2.0 * u * u;
        assert!((config_measure(FreePoint::PENTAGON).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn pentagon_is_a_local_minimum_of_the_measure() {
        let m0 = config_measure(FreePoint::PENTAGON).unwrap();
        for (dx, dy) in [(1e-3, -1e-3), (-1e-3, 1e-3), (1e-3, 1e-3), (0.0, 1e-3)] {
            assert!(config_measure(FreePoint::new(1.0 + dx, 1.0 + dy)).unwrap() > m0);
        }
    }

    #[test]
    fn measure_is_reflection_symmetric() {
        // Reflecting about the x-axis relabels bodies 2↔5 and 3↔4, which maps
        // (r3, r5) to (r4, r2).
        for p in [FreePoint::new(0.4, 0.9), FreePoint::new(1.2, 0.7), FreePoint::new(1.5, 2.5)] {
            let s = close_center_of_mass(p).unwrap();
            let reflected = FreePoint::new(s.r(4), s.r(2));
            let a = config_measure(p).unwrap();
            let b = config_measure(reflected).unwrap();
            assert!((a - b).abs() < 1e-11 * a);
            // Same value from explicitly reflected positions.
            let q = positions(&s).map(|v| [v[0], -v[1]]);
            let u = potential_of_positions(&q).unwrap();
            let direct = moment_from_distances(&q).unwrap() * u * u;
            assert!((direct - a).abs() < 1e-11 * a);
        }
    }

    #[test]
    fn printed_lambda_constants() {
        let b = golden_b();
        let cases = [
            ("31", b / 2.02, 1.0, 1.37246),
            ("41", b / 2.02, b / 2.0, 1.30144),
            ("31", b / 2.02, 0.12874, 9.02703),
            ("31", b / 2.02, b / 2.0, 2.70691),
            ("31", b / 2.0, b / 2.0, 2.70464),
            ("11", b, 1.0, 1.84995),
            ("52", 1.0, b / 2.0, 4.4042),
            ("52", b / 2.0, b / (2.0 + nz()), 5.76142),
            ("41", 2.0 / b, 1.0 + b, 0.360157),
        ];
        for (i, r3, r5, want) in cases {
            let got = lambda_component(idx(i), FreePoint::new(r3, r5)).unwrap();
            assert!(((got - want) / want).abs() < 1e-4, "λ{i}({r3},{r5}) = {got}");
        }
    }

    #[test]
    fn all_lambdas_coincide_at_pentagon() {
        let rv = residual_vector(FreePoint::PENTAGON).unwrap();
        // λ* by direct summation, frozen.
        let star = 1.376_381_920_471_17;
        for v in rv.lambda_values.values() {
            assert!((v - star).abs() < 1e-12);
        }
        assert!(rv.pairwise_spread <= 1e-12);
        assert!(rv.y1.abs() <= 1e-13);
    }

    #[test]
    fn summands_at_pentagon_pair_up_by_reflection() {
        // Neighbours of body 1 in ascending order are bodies 2, 3, 4, 5;
        // reflection swaps 2↔5 and 3↔4.
        let t = lambda_summands(idx("11"), FreePoint::PENTAGON).unwrap();
        assert!((t[0] - t[3]).abs() < 1e-14);
        assert!((t[1] - t[2]).abs() < 1e-14);
    }

    #[test]
    fn lambda31_summand_fixture() {
        let b = golden_b();
        let t = lambda_summands(idx("31"), FreePoint::new(b / 2.02, 0.3)).unwrap();
        let frozen = [
            0.830_591_114_474_486_2,
            4.603_513_869_610_325,
            -0.620_759_562_331_6,
            1.786_770_037_270_911,
        ];
        for (x, y) in t.iter().zip(frozen) {
            assert!((x - y).abs() < 1e-12, "{t:?}");
        }
    }

    #[test]
    fn y1_vanishes_on_reflection_symmetric_points() {
        assert!(y1_residual(FreePoint::PENTAGON).unwrap().abs() < 1e-13);
        // r2 = r5 and r4 = r3 hold on the line r3 = 1 (then r2 = 1 + φ(r5 - 1)
        // is not r5 in general), so search the symmetric family directly:
        // r4 = r3 and r2 = r5 both reduce to r3 + r5 = ... see below.
        // φ(1 - r3) + r5 = r3 and 1 + φ(r5 - r3) = r5 give r5 = (1+φ) r3 - φ.
        let phi = crate::model::golden_a() / 2.0;
        for r3 in [0.8, 0.95, 1.1] {
            let r5 = (1.0 + phi) * r3 - phi;
            let p = FreePoint::new(r3, r5);
            if !in_domain(p) {
                continue;
            }
            let s = close_center_of_mass(p).unwrap();
            assert!((s.r(2) - r5).abs() < 1e-13 && (s.r(4) - r3).abs() < 1e-13);
            assert!(y1_residual(p).unwrap().abs() < 1e-13);
        }
        assert!(y1_residual(FreePoint::new(1.1, 1.2)).unwrap().abs() > 1e-3);
    }

    #[test]
    fn spread_is_positive_off_the_pentagon() {
        assert!(residual_vector(FreePoint::new(0.5, 0.5)).unwrap().pairwise_spread > 0.1);
        assert!(residual_vector(FreePoint::new(1.1, 1.2)).unwrap().pairwise_spread > 1e-3);
    }

    #[test]
    fn outside_domain_is_an_error() {
        assert!(matches!(
            lambda_component(idx("11"), FreePoint::new(3.0, 0.1)),
            Err(ModelError::DomainError { .. })
        ));
        assert!(residual_vector(FreePoint::new(-0.1, 1.0)).is_err());
    }

    #[test]
    fn gradient_vanishes_at_pentagon() {
        let g = gradient_measure(FreePoint::PENTAGON, 1e-4).unwrap();
        assert!(g[0].hypot(g[1]) <= 1e-7, "{g:?}");
    }

    #[test]
    fn hessian_matches_closed_form() {
        let h = hessian_measure(FreePoint::PENTAGON, 1e-4).unwrap();
        let (target, det) = pentagon_hessian_closed_form();
        for i in 0..2 {
            for j in 0..2 {
                let rel = ((h[i][j] - target[i][j]) / target[i][j]).abs();
                assert!(rel <= 1e-5, "H[{i}][{j}] = {} vs {}", h[i][j], target[i][j]);
            }
        }
        assert!(((det2(&h) - det) / det).abs() <= 1e-5);
        assert!(h[0][0] > 0.0 && det2(&h) > 0.0);
        assert!((h[0][1] - h[1][0]).abs() < 1e-12);
        // Numeric closed-form values.
        assert!((target[0][0] - 67.5861).abs() < 1e-4);
        assert!((target[0][1] + 33.7931).abs() < 1e-4);
        assert!((target[1][1] - 25.8156).abs() < 1e-4);
        assert!((det - 602.805).abs() < 1e-3);
    }

    #[test]
    fn hessian_stencil_must_stay_in_domain() {
        let b = golden_b();
        assert!(hessian_measure(FreePoint::new(b / 2.0 + 1e-5, 1e-5), 1e-4).is_err());
    }

    proptest! {
        #[test]
        fn summands_add_up_to_lambda(r3 in 0.05f64..3.0, r5 in 0.05f64..3.0, k in 0usize..9) {
            let p = FreePoint::new(r3, r5);
            prop_assume!(in_domain(p));
            let i = LambdaIndex::ALL[k];
            let total = lambda_component(i, p).unwrap();
            let parts: f64 = lambda_summands(i, p).unwrap().iter().sum();
            prop_assert!((total - parts).abs() <= 1e-13 * total.abs().max(1.0));
        }

        #[test]
        fn reflection_maps_lambda_multisets(r3 in 0.1f64..2.5, r5 in 0.1f64..2.5) {
            let p = FreePoint::new(r3, r5);
            prop_assume!(in_domain(p));
            let s = close_center_of_mass(p).unwrap();
            let refl = FreePoint::new(s.r(4), s.r(2));
            prop_assume!(in_domain(refl));
            let mut a: Vec<f64> = residual_vector(p).unwrap().lambda_values.into_values().collect();
            let mut b: Vec<f64> = residual_vector(refl).unwrap().lambda_values.into_values().collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}
