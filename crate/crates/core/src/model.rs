//! Geometry of a five-body star configuration: equally spaced angles, the
//! center-of-mass closure that eliminates `r2` and `r4`, positions, mutual
//! distances and the admissible domain Ŝ of `(r3, r5)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("point ({r3}, {r5}) lies outside the admissible domain")]
    DomainError { r3: f64, r5: f64 },
    #[error("bodies {0} and {1} collide")]
    CollisionError(usize, usize),
    #[error("family parameter {value} out of range for {family:?}")]
    RangeError { family: Family, value: f64 },
    #[error("coordinate q_{0}{1} is too close to zero to divide by")]
    NearZeroDenominator(usize, usize),
}

pub const N_BODIES: usize = 5;

/// `√5`
pub fn sqrt5() -> f64 {
    5f64.sqrt()
}

/// `a = √5 + 1`
pub fn golden_a() -> f64 {
    sqrt5() + 1.0
}

/// `b = √5 - 1`
pub fn golden_b() -> f64 {
    sqrt5() - 1.0
}

/// Cosines of the star angles written in `√5`.
pub fn star_cos() -> [f64; 5] {
    let c1 = golden_b() / 4.0;
    let c2 = -golden_a() / 4.0;
    [1.0, c1, c2, c2, c1]
}

/// Sines of the star angles written in `√5`.
pub fn star_sin() -> [f64; 5] {
    let s1 = (10.0 + 2.0 * sqrt5()).sqrt() / 4.0;
    let s2 = (10.0 - 2.0 * sqrt5()).sqrt() / 4.0;
    [0.0, s1, s2, -s2, -s1]
}

/// `θ_i = 2π(i-1)/5` for `i = 1..5`.
pub fn angles() -> [f64; 5] {
    std::array::from_fn(|i| 2.0 * PI * i as f64 / N_BODIES as f64)
}

/// The free coordinates `(r3, r5)` of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreePoint {
    pub r3: f64,
    pub r5: f64,
}

impl FreePoint {
    pub const PENTAGON: FreePoint = FreePoint { r3: 1.0, r5: 1.0 };

    pub fn new(r3: f64, r5: f64) -> Self {
        FreePoint { r3, r5 }
    }
}

/// The five polar radii, with `r1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarRadii(pub [f64; 5]);

impl StarRadii {
    pub fn r(&self, body: usize) -> f64 {
        self.0[body - 1]
    }

    pub fn scaled(&self, c: f64) -> StarRadii {
        StarRadii(self.0.map(|r| c * r))
    }
}

/// Ŝ: `r3 > 0`, `r5 > 0`, `r5 > r3 - b/2`, `r5 > (a r3 - a)/2`.
pub fn in_domain(p: FreePoint) -> bool {
    let (a, b) = (golden_a(), golden_b());
    p.r3 > 0.0 && p.r5 > 0.0 && p.r5 > p.r3 - b / 2.0 && p.r5 > (a * p.r3 - a) / 2.0
}

/// Solves the center-of-mass equations
/// `Σ r_i cos θ_i = 0`, `Σ r_i sin θ_i = 0` for `(r2, r4)`.
pub fn close_center_of_mass(p: FreePoint) -> Result<StarRadii, ModelError> {
    let (c, s) = (star_cos(), star_sin());
    // [c1 c3; s1 s3] [r2; r4] = -[c0 + c2 r3 + c4 r5; s0 + s2 r3 + s4 r5]
    let rhs_x = -(c[0] + c[2] * p.r3 + c[4] * p.r5);
    let rhs_y = -(s[0] + s[2] * p.r3 + s[4] * p.r5);
    let det = c[1] * s[3] - c[3] * s[1];
    let r2 = (rhs_x * s[3] - c[3] * rhs_y) / det;
    let r4 = (c[1] * rhs_y - s[1] * rhs_x) / det;
    if !(p.r3 > 0.0 && p.r5 > 0.0 && r2 > 0.0 && r4 > 0.0) {
        return Err(ModelError::DomainError { r3: p.r3, r5: p.r5 });
    }
    Ok(StarRadii([1.0, r2, p.r3, r4, p.r5]))
}

pub type Positions = [[f64; 2]; 5];

/// `q_i = r_i (cos θ_i, sin θ_i)`; body 1 is placed exactly on the x-axis.
pub fn positions(s: &StarRadii) -> Positions {
    let (c, sn) = (star_cos(), star_sin());
    std::array::from_fn(|i| [s.0[i] * c[i], s.0[i] * sn[i]])
}

/// Positions from explicit angles, for configurations rotated off the axis.
pub fn positions_at(radii: &[f64; 5], angles: &[f64; 5]) -> Positions {
    std::array::from_fn(|i| [radii[i] * angles[i].cos(), radii[i] * angles[i].sin()])
}

pub const COLLISION_EPS: f64 = 1e-12;

/// Symmetric matrix of `r_ij = |q_i - q_j|`.
pub fn mutual_distances(q: &Positions) -> Result<[[f64; 5]; 5], ModelError> {
    let mut d = [[0.0; 5]; 5];
    for i in 0..5 {
        for j in (i + 1)..5 {
            let r = (q[i][0] - q[j][0]).hypot(q[i][1] - q[j][1]);
            if r < COLLISION_EPS {
                return Err(ModelError::CollisionError(i + 1, j + 1));
            }
            d[i][j] = r;
            d[j][i] = r;
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `(b/(2+η), r5)`
    Eta,
    /// `(r3, b/(2+ζ))`
    Zeta,
    /// `(b+μ, r5)`
    Mu,
    /// `(r3, 1-ι)`
    Iota,
    /// `(r3, 1+ξ)`
    Xi,
}

/// One member of a one-parameter family of lines through Ŝ, together with
/// the coordinate that stays free along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParam {
    pub family: Family,
    pub value: f64,
    pub free_coordinate: f64,
}

/// `nd(ζ) = (b/2)(4+ζ)/(2+ζ)`, the right end `r5 + b/2` of the `r3` range on
/// the line `r5 = b/(2+ζ)`.
pub fn nd(zeta: f64) -> f64 {
    golden_b() / 2.0 * ((4.0 + zeta) / (2.0 + zeta))
}

/// `nz = 4(b-1)/(2-b)`, the ζ at which `b/(2+ζ) = (2-b)/2`.
pub fn nz() -> f64 {
    let b = golden_b();
    4.0 * (b - 1.0) / (2.0 - b)
}

fn family_in_range(family: Family, v: f64) -> bool {
    let b = golden_b();
    match family {
        Family::Eta | Family::Zeta | Family::Xi => v >= 0.0,
        Family::Mu => (0.0..2.0 / b - b).contains(&v),
        Family::Iota => v > 0.0 && v < 1.0 - b / 2.0,
    }
}

/// Maps a family member to the point it parametrizes.
///
/// η is accepted at its closed endpoint 0, the line `r3 = b/2` the proofs
/// bound the family by.
pub fn family_to_point(f: FamilyParam) -> Result<FreePoint, ModelError> {
    if !f.value.is_finite() || !family_in_range(f.family, f.value) {
        return Err(ModelError::RangeError {
            family: f.family,
            value: f.value,
        });
    }
    let b = golden_b();
    let t = f.free_coordinate;
    Ok(match f.family {
        Family::Eta => FreePoint::new(b / (2.0 + f.value), t),
        Family::Zeta => FreePoint::new(t, b / (2.0 + f.value)),
        Family::Mu => FreePoint::new(b + f.value, t),
        Family::Iota => FreePoint::new(t, 1.0 - f.value),
        Family::Xi => FreePoint::new(t, 1.0 + f.value),
    })
}
