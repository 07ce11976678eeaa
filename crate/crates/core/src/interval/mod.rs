//! Outward-rounded interval arithmetic and the interval extension of the
//! λ residual functions.
//!
//! Intervals are closed and may have infinite endpoints. A semi-infinite
//! result such as `1 / [0, 2] = [0.5, +inf]` encloses the image of the
//! operands with the single point where the operation is undefined removed.
//! The λ kernel relies on this: on every admissible point the radii are
//! strictly positive, so an endpoint that touches zero only does so on the
//! boundary of the domain.

mod consts;
mod dual;
mod kernel;
pub(crate) mod round;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use consts::{pentagon_constants, PentagonConstants};
pub use dual::Dual2;
pub use kernel::{gap_interval, lambda_interval, star_enclosure, Enclosure, StarEnclosure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("divisor interval contains zero in its interior")]
    DivisionByZeroInterval,
    #[error("argument interval has a negative part")]
    NegativeArgument,
    #[error("denominator enclosure straddles zero")]
    DenominatorStraddlesZero,
    #[error("box leaves the closure of the admissible domain")]
    DomainError,
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    /// Midpoint rounded to nearest; always lies inside the interval.
    pub fn mid(&self) -> f64 {
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            if self.lo.is_finite() {
                return self.lo;
            }
            if self.hi.is_finite() {
                return self.hi;
            }
            return 0.0;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// Zero lies strictly between the endpoints.
    pub fn straddles_zero(&self) -> bool {
        self.lo < 0.0 && 0.0 < self.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn interior_subset_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }

    pub fn sqr(self) -> Interval {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        let (small, large) = if a < b { (a, b) } else { (b, a) };
        let lo = if self.contains_zero() {
            0.0
        } else {
            round::mul_down(small, small)
        };
        Interval {
            lo,
            hi: round::mul_up(large, large),
        }
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeArgument);
        }
        Ok(Interval {
            lo: round::sqrt_down(self.lo),
            hi: round::sqrt_up(self.hi),
        })
    }

    /// Reciprocal. A zero endpoint yields a semi-infinite interval; zero in
    /// the interior (or a zero point interval) is an error.
    pub fn recip(self) -> Result<Interval, IntervalError> {
        if self.straddles_zero() || (self.lo == 0.0 && self.hi == 0.0) {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let lo = if self.hi == 0.0 {
            f64::NEG_INFINITY
        } else {
            round::div_down(1.0, self.hi)
        };
        let hi = if self.lo == 0.0 {
            f64::INFINITY
        } else {
            round::div_up(1.0, self.lo)
        };
        Ok(Interval { lo, hi })
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.lo == 0.0 || rhs.hi == 0.0 {
            return Ok(self * rhs.recip()?);
        }
        if rhs.straddles_zero() {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let c = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let lo = c
            .iter()
            .map(|&(a, b)| round::div_down(a, b))
            .fold(f64::INFINITY, f64::min);
        let hi = c
            .iter()
            .map(|&(a, b)| round::div_up(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval { lo, hi })
    }

    /// Encloses `x^(-3/2)` as the reciprocal of `x * sqrt(x)`.
    pub fn powneg32(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeArgument);
        }
        let s = self.sqrt()?;
        (self * s).recip()
    }

    pub fn max_with(self, x: f64) -> Interval {
        Interval {
            lo: self.lo.max(x),
            hi: self.hi.max(x),
        }
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::add_down(self.lo, rhs.lo),
            hi: round::add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::sub_down(self.lo, rhs.hi),
            hi: round::sub_up(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let c = [
            (self.lo, rhs.lo),
            (self.lo, rhs.hi),
            (self.hi, rhs.lo),
            (self.hi, rhs.hi),
        ];
        let lo = c
            .iter()
            .map(|&(a, b)| round::mul_down(a, b))
            .fold(f64::INFINITY, f64::min);
        let hi = c
            .iter()
            .map(|&(a, b)| round::mul_up(a, b))
            .fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }
}

pub fn iv_add(a: Interval, b: Interval) -> Interval {
    a + b
}

pub fn iv_sub(a: Interval, b: Interval) -> Interval {
    a - b
}

pub fn iv_mul(a: Interval, b: Interval) -> Interval {
    a * b
}

pub fn iv_div(a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    a.checked_div(b)
}

pub fn iv_sqrt(a: Interval) -> Result<Interval, IntervalError> {
    a.sqrt()
}

pub fn iv_powneg32(a: Interval) -> Result<Interval, IntervalError> {
    a.powneg32()
}

/// An axis-aligned box in the `(r3, r5)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub r3: Interval,
    pub r5: Interval,
}

impl Box2 {
    pub fn new(r3: Interval, r5: Interval) -> Self {
        Box2 { r3, r5 }
    }

    pub fn from_bounds(r3_lo: f64, r3_hi: f64, r5_lo: f64, r5_hi: f64) -> Self {
        Box2 {
            r3: Interval::new(r3_lo, r3_hi),
            r5: Interval::new(r5_lo, r5_hi),
        }
    }

    pub fn point(r3: f64, r5: f64) -> Self {
        Box2 {
            r3: Interval::point(r3),
            r5: Interval::point(r5),
        }
    }

    pub fn max_width(&self) -> f64 {
        self.r3.width().max(self.r5.width())
    }

    pub fn midpoint(&self) -> (f64, f64) {
        (self.r3.mid(), self.r5.mid())
    }

    pub fn contains(&self, r3: f64, r5: f64) -> bool {
        self.r3.contains(r3) && self.r5.contains(r5)
    }

    pub fn subset_of(&self, other: &Box2) -> bool {
        self.r3.subset_of(&other.r3) && self.r5.subset_of(&other.r5)
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.r3.lo(), self.r5.lo()),
            (self.r3.hi(), self.r5.lo()),
            (self.r3.lo(), self.r5.hi()),
            (self.r3.hi(), self.r5.hi()),
        ]
    }

    /// Splits the wider dimension at its midpoint; ties split `r3`.
    pub fn bisect(&self) -> (Box2, Box2) {
        if self.r3.width() >= self.r5.width() {
            let (a, b) = self.r3.bisect();
            (Box2::new(a, self.r5), Box2::new(b, self.r5))
        } else {
            let (a, b) = self.r5.bisect();
            (Box2::new(self.r3, a), Box2::new(self.r3, b))
        }
    }

    /// Interiors overlap (shared edges do not count).
    pub fn interiors_overlap(&self, other: &Box2) -> bool {
        self.r3.lo() < other.r3.hi()
            && other.r3.lo() < self.r3.hi()
            && self.r5.lo() < other.r5.hi()
            && other.r5.lo() < self.r5.hi()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn field_operations_on_small_integers() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(-1.0, 2.0) * iv(3.0, 4.0), iv(-4.0, 8.0));
        assert_eq!(iv(1.0, 2.0) - iv(3.0, 4.0), iv(-3.0, -1.0));
        assert_eq!(iv(1.0, 2.0).checked_div(iv(4.0, 8.0)), Ok(iv(0.125, 0.5)));
    }

    #[test]
    fn division_by_interval_straddling_zero_is_rejected() {
        let divisor = iv(-f64::EPSILON, 1.0);
        assert_eq!(
            iv(1.0, 2.0).checked_div(divisor),
            Err(IntervalError::DivisionByZeroInterval)
        );
        assert_eq!(
            iv_div(iv(1.0, 2.0), Interval::ZERO),
            Err(IntervalError::DivisionByZeroInterval)
        );
    }

    #[test]
    fn division_by_interval_with_zero_endpoint_is_semi_infinite() {
        let q = iv(1.0, 2.0).checked_div(iv(0.0, 4.0)).unwrap();
        assert_eq!(q, iv(0.25, f64::INFINITY));
        let q = iv(-2.0, -1.0).checked_div(iv(0.0, 4.0)).unwrap();
        assert_eq!(q, iv(f64::NEG_INFINITY, -0.25));
        let q = iv(-2.0, -1.0).checked_div(iv(-4.0, 0.0)).unwrap();
        assert_eq!(q, iv(0.25, f64::INFINITY));
    }

    #[test]
    fn sqrt_and_three_halves_power() {
        assert_eq!(iv_sqrt(iv(4.0, 9.0)), Ok(iv(2.0, 3.0)));
        assert_eq!(iv_powneg32(Interval::ONE), Ok(Interval::ONE));
        let p = iv_powneg32(Interval::point(4.0)).unwrap();
        assert!(p.contains(0.125));
        assert!(p.width() <= 2.0 * f64::EPSILON * 0.125);
        assert_eq!(iv_powneg32(iv(-1.0, 1.0)), Err(IntervalError::NegativeArgument));
        assert_eq!(iv_sqrt(iv(-1e-300, 1.0)), Err(IntervalError::NegativeArgument));
        assert_eq!(iv_powneg32(iv(0.0, 4.0)), Ok(iv(0.125, f64::INFINITY)));
    }

    #[test]
    fn square_is_nonnegative() {
        assert_eq!(iv(-1.0, 2.0).sqr(), iv(0.0, 4.0));
        assert_eq!(iv(-3.0, -2.0).sqr(), iv(4.0, 9.0));
    }

    #[test]
    fn outward_rounding_keeps_one_third() {
        let third = Interval::ONE.checked_div(Interval::point(3.0)).unwrap();
        assert!(third.lo() < third.hi());
        let back = third * Interval::point(3.0);
        assert!(back.contains(1.0));
    }

    #[test]
    fn bisect_splits_wider_side() {
        let b = Box2::from_bounds(0.0, 1.0, 0.0, 4.0);
        let (l, r) = b.bisect();
        assert_eq!(l.r5, iv(0.0, 2.0));
        assert_eq!(r.r5, iv(2.0, 4.0));
        assert_eq!(l.r3, b.r3);
    }
}
