use std::ops::{Add, Mul, Neg, Sub};

use super::{pentagon_constants, Box2, Interval, IntervalError};
use crate::potential::LambdaIndex;

/// Scalar types the λ kernel can be evaluated over: plain intervals, or
/// intervals carrying derivative enclosures.
pub trait Enclosure:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: Interval) -> Self;
    fn value(&self) -> Interval;
    fn sqr(self) -> Self;
    fn powneg32(self) -> Result<Self, IntervalError>;
    fn div(self, rhs: Self) -> Result<Self, IntervalError>;
    /// Restricts to the non-negative part, `None` if nothing is left.
    fn clip_nonneg(self) -> Option<Self>;
}

impl Enclosure for Interval {
    fn constant(c: Interval) -> Self {
        c
    }

    fn value(&self) -> Interval {
        *self
    }

    fn sqr(self) -> Self {
        Interval::sqr(self)
    }

    fn powneg32(self) -> Result<Self, IntervalError> {
        Interval::powneg32(self)
    }

    fn div(self, rhs: Self) -> Result<Self, IntervalError> {
        self.checked_div(rhs)
    }

    fn clip_nonneg(self) -> Option<Self> {
        (self.hi() >= 0.0).then(|| self.max_with(0.0))
    }
}

/// Enclosures of the radii and Cartesian coordinates of a star
/// configuration over a set of `(r3, r5)` values.
#[derive(Debug, Clone, Copy)]
pub struct StarEnclosure<T> {
    pub radii: [T; 5],
    pub q: [[T; 2]; 5],
}

/// Closes the center of mass over `(r3, r5)` and places the five bodies.
///
/// With `r1 = 1` the two center-of-mass equations solve to
/// `r2 = 1 + φ (r5 - r3)` and `r4 = φ (1 - r3) + r5`. Every radius is
/// intersected with `[0, inf)`: only points of the closed admissible domain
/// matter, and there all radii are non-negative. A box lying entirely where
/// some radius is negative is a `DomainError`.
pub fn star_enclosure<T: Enclosure>(r3: T, r5: T) -> Result<StarEnclosure<T>, IntervalError> {
    let k = pentagon_constants();
    let one = T::constant(Interval::ONE);
    let phi = T::constant(k.phi);
    let clip = |x: T| x.clip_nonneg().ok_or(IntervalError::DomainError);

    let r2 = clip(one + phi * (r5 - r3))?;
    let r4 = clip(phi * (one - r3) + r5)?;
    let radii = [one, r2, clip(r3)?, r4, clip(r5)?];

    let mut q = [[one; 2]; 5];
    for (i, r) in radii.iter().enumerate() {
        q[i] = [*r * T::constant(k.cos[i]), *r * T::constant(k.sin[i])];
    }
    // Body 1 sits exactly at (1, 0).
    q[0] = [one, T::constant(Interval::ZERO)];
    Ok(StarEnclosure { radii, q })
}

impl<T: Enclosure> StarEnclosure<T> {
    /// `|q_i - q_j|^(-3)`, semi-infinite when the pair may collide on the
    /// boundary of the set.
    pub fn inv_cube_distance(&self, i: usize, j: usize) -> Result<T, IntervalError> {
        let dx = self.q[i][0] - self.q[j][0];
        let dy = self.q[i][1] - self.q[j][1];
        (dx.sqr() + dy.sqr()).powneg32()
    }

    /// Interval extension of `λ_ik = (1/q_ik) Σ_{j≠i} (q_ik - q_jk) / r_ij³`.
    pub fn lambda(&self, idx: LambdaIndex) -> Result<T, IntervalError> {
        let (i, k) = (idx.body_index(), idx.component_index());
        let den = self.q[i][k];
        let dv = den.value();
        if dv.straddles_zero() || (dv.lo() == 0.0 && dv.hi() == 0.0) {
            return Err(IntervalError::DenominatorStraddlesZero);
        }
        let mut sum = T::constant(Interval::ZERO);
        for j in (0..5).filter(|&j| j != i) {
            sum = sum + (self.q[i][k] - self.q[j][k]) * self.inv_cube_distance(i, j)?;
        }
        sum.div(den)
    }

    /// Body-1 y-force numerator `-Σ_{j≠1} q_j2 / r_1j³`.
    pub fn y1(&self) -> Result<T, IntervalError> {
        let mut sum = T::constant(Interval::ZERO);
        for j in 1..5 {
            sum = sum - self.q[j][1] * self.inv_cube_distance(0, j)?;
        }
        Ok(sum)
    }
}

/// Encloses `{ λ_idx(p) : p ∈ box }`.
pub fn lambda_interval(idx: LambdaIndex, b: &Box2) -> Result<Interval, IntervalError> {
    star_enclosure(b.r3, b.r5)?.lambda(idx)
}

/// Encloses `λ_larger - λ_smaller` over the box. A positive lower endpoint
/// proves `λ_smaller < λ_larger` at every admissible point of the box.
pub fn gap_interval(
    smaller: LambdaIndex,
    larger: LambdaIndex,
    b: &Box2,
) -> Result<Interval, IntervalError> {
    let s = star_enclosure(b.r3, b.r5)?;
    Ok(s.lambda(larger)? - s.lambda(smaller)?)
}
