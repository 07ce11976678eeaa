//! Krawczyk test around the regular pentagon.
//!
//! For the square map `F = (λ11 - λ31, λ11 - λ51)` on `B0` with midpoint
//! `c`, interval Jacobian `J(B0)` and any real matrix `C`,
//!
//! ```text
//! K = c - C F(c) + (I - C J(B0)) (B0 - c).
//! ```
//!
//! `K ⊂ int B0` proves that `F` has exactly one zero in `B0`. Every central
//! configuration is a zero of `F`, so (1, 1) is the only one in `B0`.

use serde::{Deserialize, Serialize};

use super::hexfloat::{HexBox, HexF64, HexInterval};
use super::{fingerprint, CertifyError, FORMAT_LOCAL, FORMAT_VERSION};
use crate::interval::{star_enclosure, Box2, Dual2, Interval, IntervalError};
use crate::model::FreePoint;
use crate::potential::{residual_vector, LambdaIndex};
use crate::regions::{pentagon_box, Grid};
use crate::solver::{newton_refine, NewtonOptions};

/// The square subsystem, each entry `[a, b]` meaning `λ_a - λ_b`.
pub fn subsystem() -> [[LambdaIndex; 2]; 2] {
    let l = |s: &str| s.parse::<LambdaIndex>().unwrap();
    [[l("11"), l("31")], [l("11"), l("51")]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalUniquenessCertificate {
    pub format: String,
    pub version: u32,
    pub fingerprint: String,
    pub delta: HexF64,
    pub b0: HexBox,
    pub subsystem: [[LambdaIndex; 2]; 2],
    pub center: [HexF64; 2],
    pub f_center: [HexInterval; 2],
    pub jacobian: [[HexInterval; 2]; 2],
    pub preconditioner: [[HexF64; 2]; 2],
    pub krawczyk: HexBox,
    /// Upper bound of `‖I - C J(B0)‖∞`; below 1 means every matrix in the
    /// Jacobian enclosure is nonsingular.
    pub contraction_norm: HexF64,
    /// Float Newton root started inside B0, with its full residual.
    pub root: [f64; 2],
    pub root_spread: f64,
    pub root_y1: f64,
}

pub(crate) struct Krawczyk {
    pub f_center: [Interval; 2],
    pub jacobian: [[Interval; 2]; 2],
    pub k: Box2,
    pub norm: f64,
}

fn residual<T: crate::interval::Enclosure>(r3: T, r5: T) -> Result<[T; 2], IntervalError> {
    let star = star_enclosure(r3, r5)?;
    let mut out = [r3; 2];
    for (slot, [a, b]) in subsystem().iter().enumerate() {
        out[slot] = star.lambda(*a)? - star.lambda(*b)?;
    }
    Ok(out)
}

/// Interval Jacobian over the box, as the hull of the Dual2 enclosures over
/// a `JACOBIAN_SPLITS`² grid of sub-boxes.
pub(crate) fn jacobian(b: &Box2) -> Result<[[Interval; 2]; 2], IntervalError> {
    let grid = Grid::new(*b, b.r3.width().max(b.r5.width()) / JACOBIAN_SPLITS as f64);
    let mut hull: Option<[[Interval; 2]; 2]> = None;
    for k in 0..grid.len() {
        let cell = grid.cell(k);
        let f = residual(Dual2::variable(cell.r3, 0), Dual2::variable(cell.r5, 1))?;
        let j = [f[0].d, f[1].d];
        hull = Some(match hull {
            None => j,
            Some(h) => std::array::from_fn(|i| std::array::from_fn(|l| h[i][l].hull(&j[i][l]))),
        });
    }
    hull.ok_or(IntervalError::DomainError)
}

pub const JACOBIAN_SPLITS: usize = 128;

fn inverse(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    (det != 0.0 && det.is_finite()).then(|| {
        [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
    })
}

pub(crate) fn krawczyk(b: &Box2, c: [[f64; 2]; 2]) -> Result<Krawczyk, IntervalError> {
    let (m3, m5) = b.midpoint();
    let f = residual(Interval::point(m3), Interval::point(m5))?;
    let jac = jacobian(b)?;
    let ci = c.map(|row| row.map(Interval::point));
    let dev = [b.r3 - Interval::point(m3), b.r5 - Interval::point(m5)];
    let center = [m3, m5];
    let mut k = [Interval::ZERO; 2];
    let mut norm = 0.0f64;
    for i in 0..2 {
        let cf = ci[i][0] * f[0] + ci[i][1] * f[1];
        let mut acc = Interval::point(center[i]) - cf;
        let mut row = Interval::ZERO;
        for j in 0..2 {
            let delta = if i == j { Interval::ONE } else { Interval::ZERO };
            let m = delta - (ci[i][0] * jac[0][j] + ci[i][1] * jac[1][j]);
            acc = acc + m * dev[j];
            row = row + Interval::point(m.mag());
        }
        k[i] = acc;
        norm = norm.max(row.hi());
    }
    Ok(Krawczyk { f_center: f, jacobian: jac, k: Box2::new(k[0], k[1]), norm })
}

pub(crate) fn contracts(b: &Box2, kr: &Krawczyk) -> bool {
    kr.k.r3.interior_subset_of(&b.r3) && kr.k.r5.interior_subset_of(&b.r5) && kr.norm < 1.0
}

/// Runs the Krawczyk test on `B0 = [1-δ, 1+δ]²` and checks the full residual
/// at a Newton root started inside `B0`.
pub fn certify_local_uniqueness(delta: f64) -> Result<LocalUniquenessCertificate, CertifyError> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(CertifyError::InvalidConfig(format!("delta must lie in (0, 0.5], got {delta}")));
    }
    let fail = |m: String| CertifyError::ContractionFailure(m);
    let b0 = pentagon_box(delta);
    let jac = jacobian(&b0).map_err(|e| fail(format!("Jacobian enclosure: {e}")))?;
    let c = inverse(jac.map(|row| row.map(|x| x.mid())))
        .ok_or_else(|| fail("midpoint Jacobian is singular".into()))?;
    let kr = krawczyk(&b0, c).map_err(|e| fail(format!("Krawczyk operator: {e}")))?;
    if !contracts(&b0, &kr) {
        return Err(fail(format!(
            "K = {:?} is not inside int(B0) = {:?} or ‖I - CJ‖ = {} >= 1; try a smaller delta",
            kr.k, b0, kr.norm
        )));
    }
    let start = FreePoint::new(1.0 + delta / 2.0, 1.0 - delta / 2.0);
    let root = newton_refine(start, &NewtonOptions::default())
        .map_err(|e| fail(format!("Newton refinement from {start:?}: {e}")))?;
    let rv = residual_vector(root.point).map_err(|e| fail(e.to_string()))?;
    if !kr.k.contains(root.point.r3, root.point.r5) || rv.pairwise_spread > 1e-10 || rv.y1.abs() > 1e-10 {
        return Err(fail(format!(
            "refined root {:?} has spread {} and y1 {}",
            root.point, rv.pairwise_spread, rv.y1
        )));
    }
    let (m3, m5) = b0.midpoint();
    Ok(LocalUniquenessCertificate {
        format: FORMAT_LOCAL.into(),
        version: FORMAT_VERSION,
        fingerprint: fingerprint(),
        delta: HexF64(delta),
        b0: b0.into(),
        subsystem: subsystem(),
        center: [HexF64(m3), HexF64(m5)],
        f_center: kr.f_center.map(Into::into),
        jacobian: kr.jacobian.map(|row| row.map(Into::into)),
        preconditioner: c.map(|row| row.map(HexF64)),
        krawczyk: kr.k.into(),
        contraction_norm: HexF64(kr.norm),
        root: [root.point.r3, root.point.r5],
        root_spread: rv.pairwise_spread,
        root_y1: rv.y1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_box_contracts() {
        let cert = certify_local_uniqueness(0.02).unwrap();
        let k = cert.krawczyk.get().unwrap();
        assert!(k.contains(1.0, 1.0));
        assert!(cert.contraction_norm.0 < 1.0, "{}", cert.contraction_norm.0);
        assert!((cert.root[0] - 1.0).abs() < 1e-10 && (cert.root[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jacobian_at_pentagon_is_nonsingular() {
        let j = jacobian(&pentagon_box(0.02)).unwrap();
        let lo_det = (j[0][0] * j[1][1] - j[0][1] * j[1][0]).lo();
        assert!(lo_det > 0.0, "{j:?}");
        let p = jacobian(&Box2::point(1.0, 1.0)).unwrap();
        assert!((p[0][0].mid() - 0.750).abs() < 1e-2, "{p:?}");
        assert!((p[1][0].mid() + 1.114).abs() < 1e-2, "{p:?}");
    }

    #[test]
    fn large_box_fails() {
        assert!(matches!(
            certify_local_uniqueness(0.5),
            Err(CertifyError::ContractionFailure(_))
        ));
    }
}
