use std::ops::{Add, Mul, Neg, Sub};

use super::{Enclosure, Interval, IntervalError};

/// Forward-mode derivative enclosure in two variables: a value interval and
/// enclosures of both partial derivatives over the same box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual2 {
    pub v: Interval,
    pub d: [Interval; 2],
}

impl Dual2 {
    pub fn constant(v: Interval) -> Self {
        Dual2 {
            v,
            d: [Interval::ZERO; 2],
        }
    }

    /// The independent variable number `k` (0 or 1) ranging over `v`.
    pub fn variable(v: Interval, k: usize) -> Self {
        let mut d = [Interval::ZERO; 2];
        d[k] = Interval::ONE;
        Dual2 { v, d }
    }

    fn scale(self, f: Interval, df: Interval) -> Self {
        Dual2 {
            v: f,
            d: [df * self.d[0], df * self.d[1]],
        }
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            v: self.v + rhs.v,
            d: [self.d[0] + rhs.d[0], self.d[1] + rhs.d[1]],
        }
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            v: self.v - rhs.v,
            d: [self.d[0] - rhs.d[0], self.d[1] - rhs.d[1]],
        }
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 {
            v: -self.v,
            d: [-self.d[0], -self.d[1]],
        }
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            v: self.v * rhs.v,
            d: [
                self.d[0] * rhs.v + self.v * rhs.d[0],
                self.d[1] * rhs.v + self.v * rhs.d[1],
            ],
        }
    }
}

impl Enclosure for Dual2 {
    fn constant(c: Interval) -> Self {
        Dual2::constant(c)
    }

    fn value(&self) -> Interval {
        self.v
    }

    fn sqr(self) -> Self {
        let two = Interval::point(2.0);
        self.scale(self.v.sqr(), two * self.v)
    }

    fn powneg32(self) -> Result<Self, IntervalError> {
        // d/dx x^(-3/2) = -3/2 x^(-5/2)
        let f = self.v.powneg32()?;
        let df = Interval::point(-1.5) * f.checked_div(self.v)?;
        Ok(self.scale(f, df))
    }

    fn div(self, rhs: Self) -> Result<Self, IntervalError> {
        let q = self.v.checked_div(rhs.v)?;
        let d0 = (self.d[0] - q * rhs.d[0]).checked_div(rhs.v)?;
        let d1 = (self.d[1] - q * rhs.d[1]).checked_div(rhs.v)?;
        Ok(Dual2 { v: q, d: [d0, d1] })
    }

    /// Derivatives are only valid where the clip is inactive, so a value
    /// interval reaching below zero is rejected instead of clipped.
    fn clip_nonneg(self) -> Option<Self> {
        (self.v.lo() >= 0.0).then_some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_point_intervals() {
        let x = Dual2::variable(Interval::point(3.0), 0);
        let y = Dual2::variable(Interval::point(2.0), 1);
        let f = x * x * y;
        assert_eq!(f.v, Interval::point(18.0));
        assert_eq!(f.d[0], Interval::point(12.0));
        assert_eq!(f.d[1], Interval::point(9.0));
    }

    #[test]
    fn powneg32_derivative_encloses_finite_difference() {
        let x0 = 1.7;
        let x = Dual2::variable(Interval::point(x0), 0);
        let f = x.powneg32().unwrap();
        let h = 1e-6;
        let fd = ((x0 + h).powf(-1.5) - (x0 - h).powf(-1.5)) / (2.0 * h);
        assert!((f.d[0].mid() - fd).abs() < 1e-8);
    }

    #[test]
    fn quotient_rule() {
        let x = Dual2::variable(Interval::point(2.0), 0);
        let one = Dual2::constant(Interval::ONE);
        let f = one.div(x).unwrap();
        assert!(f.d[0].contains(-0.25));
    }
}
