use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{in_domain, FreePoint, ModelError};
use crate::potential::{lambda_component, residual_vector, LambdaIndex};

/// Radical inverse of `k` in the given base: the `k`-th element of the
/// one-dimensional Halton sequence, in `[0, 1)`.
pub fn halton(mut k: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}


#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("start ({}, {}) is outside Ŝ", .0.r3, .0.r5)]
    StartOutsideDomain(FreePoint),
    #[error("Newton step could not stay inside Ŝ at ({}, {})", .0.r3, .0.r5)]
    LeftDomain(FreePoint),
    #[error("no descent step found after 30 halvings at ({}, {})", .0.r3, .0.r5)]
    Diverged(FreePoint),
    #[error("no convergence within {0} iterations")]
    MaxIterations(usize),
    #[error("subsystem root ({}, {}) fails the full residual gate (spread {spread:e}, y1 {y1:e})", .point.r3, .point.r5)]
    Rejected { point: FreePoint, spread: f64, y1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, max_iter: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonResult {
    pub point: FreePoint,
    pub iterations: usize,
    pub spread: f64,
    pub y1: f64,
    /// `‖F‖∞` of the square subsystem before each step and at the end.
    pub history: Vec<f64>,
}

const MAX_HALVINGS: usize = 30;

fn square(p: FreePoint) -> Result<[f64; 2], ModelError> {
    let l = |b, c| lambda_component(LambdaIndex::new(b, c).expect("static index"), p);
    let l11 = l(1, 1)?;
    Ok([l11 - l(3, 1)?, l11 - l(5, 1)?])
}

fn norm(f: [f64; 2]) -> f64 {
    f[0].abs().max(f[1].abs())
}

fn fd_jacobian(p: FreePoint, f: [f64; 2]) -> Option<[[f64; 2]; 2]> {
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let h = 1e-7 * if k == 0 { p.r3.abs() } else { p.r5.abs() }.max(1.0);
        let q = if k == 0 { FreePoint::new(p.r3 + h, p.r5) } else { FreePoint::new(p.r3, p.r5 + h) };
        let fq = square(q).ok()?;
        for i in 0..2 {
            j[i][k] = (fq[i] - f[i]) / h;
        }
    }
    Some(j)
}

/// Damped Newton on `(λ11 - λ31, λ11 - λ51)`, followed by the full residual
/// gate: every λ and `y1` must agree to `10·tol`.
pub fn newton_refine(start: FreePoint, opts: &NewtonOptions) -> Result<NewtonResult, SolveError> {
    if !in_domain(start) {
        return Err(SolveError::StartOutsideDomain(start));
    }
    let mut p = start;
    let mut f = square(p).map_err(|_| SolveError::StartOutsideDomain(start))?;
    let mut history = vec![norm(f)];
    for it in 0..=opts.max_iter {
        if norm(f) < opts.tol {
            let rv = residual_vector(p).map_err(|_| SolveError::LeftDomain(p))?;
            if rv.pairwise_spread < 10.0 * opts.tol && rv.y1.abs() < 10.0 * opts.tol {
                return Ok(NewtonResult { point: p, iterations: it, spread: rv.pairwise_spread, y1: rv.y1, history });
            }
            return Err(SolveError::Rejected { point: p, spread: rv.pairwise_spread, y1: rv.y1 });
        }
        if it == opts.max_iter {
            break;
        }
        let j = fd_jacobian(p, f).ok_or(SolveError::LeftDomain(p))?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(SolveError::Diverged(p));
        }
        let step = [
            (j[1][1] * f[0] - j[0][1] * f[1]) / det,
            (j[0][0] * f[1] - j[1][0] * f[0]) / det,
        ];
        let mut t = 1.0;
        let mut inside = false;
        let mut next = None;
        for _ in 0..=MAX_HALVINGS {
            let q = FreePoint::new(p.r3 - t * step[0], p.r5 - t * step[1]);
            if in_domain(q) {
                inside = true;
                if let Ok(fq) = square(q) {
                    if norm(fq) < norm(f) || norm(fq) < opts.tol {
                        next = Some((q, fq));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        match next {
            Some((q, fq)) => {
                p = q;
                f = fq;
                history.push(norm(f));
            }
            None if inside => return Err(SolveError::Diverged(p)),
            None => return Err(SolveError::LeftDomain(p)),
        }
    }
    Err(SolveError::MaxIterations(opts.max_iter))
}

/// Axis-aligned scan window `[r3_lo, r3_hi] × [r5_lo, r5_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub r3: [f64; 2],
    pub r5: [f64; 2],
}

impl Window {
    pub fn new(r3: [f64; 2], r5: [f64; 2]) -> Self {
        Window { r3, r5 }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Window { r3: [lo, hi], r5: [lo, hi] }
    }

    pub fn is_valid(&self) -> bool {
        self.r3[0].is_finite() && self.r5[0].is_finite() && self.r3[1].is_finite() && self.r5[1].is_finite()
            && self.r3[0] < self.r3[1] && self.r5[0] < self.r5[1]
    }

    pub fn contains(&self, p: FreePoint) -> bool {
        (self.r3[0]..=self.r3[1]).contains(&p.r3) && (self.r5[0]..=self.r5[1]).contains(&p.r5)
    }

    fn at(&self, u: f64, v: f64) -> FreePoint {
        FreePoint::new(
            self.r3[0] + u * (self.r3[1] - self.r3[0]),
            self.r5[0] + v * (self.r5[1] - self.r5[0]),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub r3: f64,
    pub r5: f64,
    pub spread: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanStats {
    pub converged: usize,
    pub rejected: usize,
    pub diverged: usize,
    pub left_domain: usize,
    pub max_iterations: usize,
    pub outside_window: usize,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub window: Window,
    pub n_starts: usize,
    pub tol: f64,
    pub merge_radius: f64,
    pub roots: Vec<Root>,
    pub stats: ScanStats,
}

pub const MERGE_RADIUS: f64 = 1e-6;

/// `n` points of the (2, 3) Halton sequence, from index `offset + 1`, mapped
/// into the window and lying in Ŝ. Gives up after `1000 n` candidates.
pub fn halton_starts(window: &Window, n: usize, offset: u64) -> Vec<FreePoint> {
    let mut out = Vec::with_capacity(n);
    let mut k = offset + 1;
    while out.len() < n && k <= offset + 1000 * n as u64 {
        let p = window.at(halton(k, 2), halton(k, 3));
        if in_domain(p) {
            out.push(p);
        }
        k += 1;
    }
    out
}

/// Multi-start Newton over `window ∩ Ŝ` with deduplicated, fully accepted
/// roots. Roots that converge outside the window are counted, not reported.
pub fn grid_scan(window: &Window, n_starts: usize, tol: f64) -> RootReport {
    grid_scan_from(window, n_starts, tol, 0)
}

/// [`grid_scan`] with the Halton sequence started after `offset` points.
pub fn grid_scan_from(window: &Window, n_starts: usize, tol: f64, offset: u64) -> RootReport {
    let opts = NewtonOptions { tol, ..NewtonOptions::default() };
    let results: Vec<Result<NewtonResult, SolveError>> = halton_starts(window, n_starts, offset)
        .into_par_iter()
        .map(|s| newton_refine(s, &opts))
        .collect();
    let mut stats = ScanStats::default();
    let mut found = Vec::new();
    let mut iters = 0usize;
    for r in results {
        match r {
            Ok(res) => {
                stats.converged += 1;
                iters += res.iterations;
                if window.contains(res.point) {
                    found.push(Root { r3: res.point.r3, r5: res.point.r5, spread: res.spread, y1: res.y1 });
                } else {
                    stats.outside_window += 1;
                }
            }
            Err(SolveError::Rejected { .. }) => stats.rejected += 1,
            Err(SolveError::Diverged(_)) => stats.diverged += 1,
            Err(SolveError::LeftDomain(_) | SolveError::StartOutsideDomain(_)) => stats.left_domain += 1,
            Err(SolveError::MaxIterations(_)) => stats.max_iterations += 1,
        }
    }
    if stats.converged > 0 {
        stats.mean_iterations = iters as f64 / stats.converged as f64;
    }
    found.sort_by(|a, b| a.r3.total_cmp(&b.r3).then(a.r5.total_cmp(&b.r5)));
    let mut roots: Vec<Root> = Vec::new();
    for r in found {
        let dup = roots
            .iter()
            .any(|q| (q.r3 - r.r3).hypot(q.r5 - r.r5) <= MERGE_RADIUS);
        if !dup {
            roots.push(r);
        }
    }
    RootReport { window: *window, n_starts, tol, merge_radius: MERGE_RADIUS, roots, stats }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refines_to_pentagon() {
        let r = newton_refine(FreePoint::new(1.05, 0.95), &NewtonOptions::default()).unwrap();
        assert!((r.point.r3 - 1.0).abs() < 1e-10 && (r.point.r5 - 1.0).abs() < 1e-10, "{r:?}");
        assert!(r.spread < 1e-11);
    }

    #[test]
    fn no_root_from_j1_start() {
        match newton_refine(FreePoint::new(0.3, 0.2), &NewtonOptions::default()) {
            Ok(r) => assert!((r.point.r3 - 1.0).abs() < 1e-8 && (r.point.r5 - 1.0).abs() < 1e-8),
            Err(_) => {}
        }
    }

    #[test]
    fn start_outside_domain() {
        assert!(matches!(
            newton_refine(FreePoint::new(3.0, 0.1), &NewtonOptions::default()),
            Err(SolveError::StartOutsideDomain(_))
        ));
    }

    #[test]
    fn quadratic_convergence() {
        let r = newton_refine(FreePoint::new(1.01, 0.99), &NewtonOptions { tol: 1e-14, max_iter: 60 }).unwrap();
        let h = &r.history;
        assert!(h.len() >= 3, "{h:?}");
        for w in h.windows(2).filter(|w| w[0] > 1e-9) {
            assert!(w[1] <= 10.0 * w[0] * w[0], "{h:?}");
        }
    }

    #[test]
    fn empty_scan() {
        let r = grid_scan(&Window::square(0.2, 3.0), 0, 1e-12);
        assert!(r.roots.is_empty());
    }

    #[test]
    fn small_scan_finds_only_pentagon() {
        let r = grid_scan(&Window::square(0.2, 3.0), 500, 1e-12);
        assert_eq!(r.roots.len(), 1, "{r:?}");
        assert!((r.roots[0].r3 - 1.0).abs() < 1e-8);
        let away = grid_scan(&Window::new([1.1, 3.0], [0.2, 3.0]), 300, 1e-12);
        assert!(away.roots.is_empty(), "{away:?}");
    }
}
