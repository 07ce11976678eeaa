//! Directed rounding for `f64` without touching the FPU rounding mode.
//!
//! Every operation is computed in round-to-nearest and then corrected with an
//! error-free transformation (TwoSum for addition, FMA residuals for
//! multiplication, division and square root). The correction moves the result
//! one ulp only when the nearest result lies on the wrong side of the exact
//! value, so exact results (in particular exact zeros) stay exact.
//!
//! Results in the subnormal range, where the residual itself may underflow,
//! are nudged unconditionally.

/// Magnitude below which residuals are not trusted.
const TINY: f64 = 1e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn overflow_down(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn overflow_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        f64::MIN
    } else {
        s
    }
}

pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !a.is_finite() || !b.is_finite() {
        return s;
    }
    if !s.is_finite() {
        return overflow_down(s);
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !a.is_finite() || !b.is_finite() {
        return s;
    }
    if !s.is_finite() {
        return overflow_up(s);
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Endpoint product with the interval convention `0 * inf = 0`.
#[inline]
fn ext_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = ext_mul(a, b);
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    if !a.is_finite() || !b.is_finite() {
        return p;
    }
    if !p.is_finite() {
        return overflow_down(p);
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = ext_mul(a, b);
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    if !a.is_finite() || !b.is_finite() {
        return p;
    }
    if !p.is_finite() {
        return overflow_up(p);
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - q` where `q` is the nearest quotient.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> f64 {
    // a - q*b is exact for finite normal operands.
    let r = (-q).mul_add(b, a);
    if b > 0.0 {
        r
    } else {
        -r
    }
}

pub fn div_down(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    let q = a / b;
    if a == 0.0 {
        return 0.0;
    }
    if !a.is_finite() || !b.is_finite() {
        return q;
    }
    if !q.is_finite() {
        return overflow_down(q);
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_down();
    }
    if div_residual_sign(a, b, q) < 0.0 {
        q.next_down()
    } else {
        q
    }
}

pub fn div_up(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    let q = a / b;
    if a == 0.0 {
        return 0.0;
    }
    if !a.is_finite() || !b.is_finite() {
        return q;
    }
    if !q.is_finite() {
        return overflow_up(q);
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_up();
    }
    if div_residual_sign(a, b, q) > 0.0 {
        q.next_up()
    } else {
        q
    }
}

pub fn sqrt_down(a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    let s = a.sqrt();
    if a == 0.0 || !a.is_finite() {
        return s;
    }
    if a < TINY {
        return s.next_down().max(0.0);
    }
    if (-s).mul_add(s, a) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub fn sqrt_up(a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    let s = a.sqrt();
    if a == 0.0 || !a.is_finite() {
        return s;
    }
    if a < TINY {
        return s.next_up();
    }
    if (-s).mul_add(s, a) > 0.0 {
        s.next_up()
    } else {
        s
    }
}
