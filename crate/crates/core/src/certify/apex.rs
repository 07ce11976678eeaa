//! Lower bound for λ52 near the apex `(b/2, 0)` of J4, where bodies 2 and 5
//! both reach the origin and plain interval evaluation of λ52 breaks down.
//!
//! With `s = sin 72°`, `q52 = -r5 s`, and λ52 splits as
//!
//! ```text
//! λ52 = Σ_{j≠5} 1/r5j³ + r2/(r5 r52³) + D/(r5 s),
//! D   = q32/r53³ + q42/r54³.
//! ```
//!
//! Every term of the first two groups is non-negative. At the apex
//! `r3 = r4 = b/2` and `r5 = 0`, so bodies 3 and 4 are mirror images across
//! the x-axis at equal distance from body 5 and `D = 0` exactly. On the
//! closure of J4, `t = r3 - b/2` lies in `[0, r5]`, so the mean value theorem
//! over a box containing the apex gives `|D| <= (|∂D/∂r3| + |∂D/∂r5|) r5`.
//! Also `r2 = φ (r5 - t) <= φ r5`, hence `r52 <= r2 + r5 <= (1 + φ) r5`.
//! Together, for every point of the box in the closure of J4 other than the
//! apex itself,
//!
//! ```text
//! λ52 >= 1/((1 + φ) r5_hi)³ - (|∂D/∂r3| + |∂D/∂r5|) / s.
//! ```

use crate::interval::{pentagon_constants, Box2, Dual2, Enclosure, Interval, IntervalError};

/// Whether the box contains the apex `(b/2, 0)`.
pub fn contains_apex(b: &Box2) -> bool {
    let half_b = pentagon_constants().half_b;
    b.r3.lo() <= half_b.lo() && b.r3.hi() >= half_b.hi() && b.r5.lo() <= 0.0 && b.r5.hi() > 0.0
}

/// Rigorous lower bound of λ52 over the part of the box lying in the
/// closure of J4, excluding the apex. The box must contain the apex.
pub fn lambda52_lower_bound(b: &Box2) -> Result<f64, IntervalError> {
    if !contains_apex(b) {
        return Err(IntervalError::DomainError);
    }
    let k = pentagon_constants();
    let c = Dual2::constant;
    let r3 = Dual2::variable(b.r3.max_with(0.0), 0);
    let r5 = Dual2::variable(b.r5.max_with(0.0), 1);
    let r4 = c(k.phi) * (c(Interval::ONE) - r3) + r5;
    if r4.v.lo() <= 0.0 {
        return Err(IntervalError::DomainError);
    }
    let point = |r: Dual2, i: usize| [r * c(k.cos[i]), r * c(k.sin[i])];
    let (q3, q4, q5) = (point(r3, 2), point(r4, 3), point(r5, 4));
    let inv_cube = |p: [Dual2; 2], q: [Dual2; 2]| {
        let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
        (dx.sqr() + dy.sqr()).powneg32()
    };
    let d = q3[1] * inv_cube(q5, q3)? + q4[1] * inv_cube(q5, q4)?;
    let grad = Interval::point(d.d[0].mag()) + Interval::point(d.d[1].mag());
    if !grad.is_finite() {
        return Err(IntervalError::DomainError);
    }
    let reach = (Interval::ONE + k.phi) * Interval::point(b.r5.hi());
    let blowup = (reach * reach * reach).recip()?;
    Ok((blowup - grad.checked_div(k.sin[1])?).lo())
}
