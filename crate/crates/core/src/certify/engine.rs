//! Box classification and the per-root branch-and-bound search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use super::apex;
use super::hexfloat::{HexBox, HexF64};
use crate::interval::{star_enclosure, Box2, Interval, IntervalError};
use crate::model::FreePoint;
use crate::potential::{lambda_component, LambdaIndex};
use crate::regions::{Check, Grid, Region, RegionId};

/// Why a leaf box needs no further work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafStatus {
    /// Every check has a positive lower bound, one per check in plan order.
    Certified { bounds: Vec<HexF64> },
    /// The box misses the closure of the region (or of its band).
    Outside,
    /// Some closed-form radius is negative on the whole box.
    OutsideDomain,
    /// The box lies in the excised square around (1, 1).
    InsideB0,
    /// The J4 apex box, bounded through [`apex::lambda52_lower_bound`].
    ApexLemma { bound: HexF64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub root: u32,
    /// Bisection choices from the root box, `0` for the lower half.
    pub path: String,
    pub status: LeafStatus,
}

impl Leaf {
    pub fn lower_bound(&self) -> Option<f64> {
        match &self.status {
            LeafStatus::Certified { bounds } => {
                Some(bounds.iter().map(|b| b.0).fold(f64::INFINITY, f64::min))
            }
            LeafStatus::ApexLemma { bound } => Some(bound.0),
            _ => None,
        }
    }
}

/// Replays a bisection path from a root box.
pub fn box_at(root: Box2, path: &str) -> Option<Box2> {
    let mut b = root;
    for c in path.chars() {
        let (lo, hi) = b.bisect();
        b = match c {
            '0' => lo,
            '1' => hi,
            _ => return None,
        };
    }
    Some(b)
}

/// One region piece: the region, an optional closed `r3` band, and the
/// checks certified there.
#[derive(Debug, Clone)]
pub struct PartContext {
    pub region: Region,
    pub band: Option<(f64, f64)>,
    pub checks: Vec<Check>,
    pub b0: Option<Box2>,
}

impl PartContext {
    pub fn rect(&self) -> Result<Box2, crate::regions::RegionError> {
        let rect = self.region.bounding_rect()?;
        Ok(match self.band {
            Some((lo, hi)) => {
                Box2::from_bounds(rect.r3.lo().max(lo), rect.r3.hi().min(hi), rect.r5.lo(), rect.r5.hi())
            }
            None => rect,
        })
    }

    pub fn excludes(&self, b: &Box2) -> bool {
        if let Some((lo, hi)) = self.band {
            if b.r3.hi() < lo || b.r3.lo() > hi {
                return true;
            }
        }
        self.region.excludes_box(b)
    }

    pub fn inside_b0(&self, b: &Box2) -> bool {
        self.b0.is_some_and(|b0| b.subset_of(&b0))
    }

    /// Float membership used only to recognise counterexamples.
    fn contains(&self, p: FreePoint) -> bool {
        let in_band = self.band.is_none_or(|(lo, hi)| lo <= p.r3 && p.r3 <= hi);
        let in_b0 = self.b0.is_some_and(|b0| b0.contains(p.r3, p.r5));
        in_band && !in_b0 && self.region.contains(p)
    }

    fn apex_applies(&self) -> bool {
        let l52: LambdaIndex = "52".parse().unwrap();
        self.region.id == RegionId::J4
            && self.checks.iter().all(|c| matches!(c, Check::Pair { larger, .. } if *larger == l52))
    }

    /// Lower bounds of every check over the box: `λ_larger - λ_smaller`
    /// for pairs, the mignitude of λ for non-vanishing checks.
    pub fn check_bounds(&self, b: &Box2) -> Result<Vec<f64>, IntervalError> {
        let star = star_enclosure(b.r3, b.r5)?;
        self.checks
            .iter()
            .map(|c| match *c {
                Check::Pair { smaller, larger } => {
                    Ok((star.lambda(larger)? - star.lambda(smaller)?).lo())
                }
                Check::Nonvanishing { index } => Ok(mignitude(star.lambda(index)?)),
            })
            .collect()
    }

    pub fn apex_bound(&self, b: &Box2) -> Option<f64> {
        if !self.apex_applies() || !apex::contains_apex(b) || b.max_width() > APEX_MAX_WIDTH {
            return None;
        }
        let lambda52 = apex::lambda52_lower_bound(b).ok()?;
        let mut bound = f64::INFINITY;
        for c in &self.checks {
            if let Check::Pair { smaller, .. } = c {
                let s = star_enclosure(b.r3, b.r5).ok()?.lambda(*smaller).ok()?;
                bound = bound.min((Interval::point(lambda52) - Interval::point(s.hi())).lo());
            }
        }
        Some(bound)
    }

    /// Decides a box, or returns `None` when it must be split.
    pub fn classify(&self, b: &Box2) -> Option<LeafStatus> {
        if self.excludes(b) {
            return Some(LeafStatus::Outside);
        }
        if self.inside_b0(b) {
            return Some(LeafStatus::InsideB0);
        }
        match self.check_bounds(b) {
            Err(IntervalError::DomainError) => return Some(LeafStatus::OutsideDomain),
            Ok(bounds) if bounds.iter().all(|&x| x > 0.0) => {
                return Some(LeafStatus::Certified {
                    bounds: bounds.into_iter().map(HexF64).collect(),
                })
            }
            _ => {}
        }
        match self.apex_bound(b) {
            Some(bound) if bound > 0.0 => Some(LeafStatus::ApexLemma { bound: HexF64(bound) }),
            _ => None,
        }
    }

    /// A float counterexample at the box midpoint, if there is one.
    fn counterexample(&self, b: &Box2) -> Option<Counterexample> {
        let (r3, r5) = b.midpoint();
        let p = FreePoint::new(r3, r5);
        if !self.contains(p) {
            return None;
        }
        for c in &self.checks {
            let value = match *c {
                Check::Pair { smaller, larger } => {
                    lambda_component(larger, p).ok()? - lambda_component(smaller, p).ok()?
                }
                Check::Nonvanishing { index } => lambda_component(index, p).ok()?.abs(),
            };
            if value <= 0.0 {
                return Some(Counterexample { check: *c, r3, r5, value });
            }
        }
        None
    }
}

/// Largest apex box the apex bound is tried on.
const APEX_MAX_WIDTH: f64 = 1.0 / 64.0;

fn mignitude(x: Interval) -> f64 {
    if x.lo() > 0.0 {
        x.lo()
    } else if x.hi() < 0.0 {
        -x.hi()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: Check,
    pub r3: f64,
    pub r5: f64,
    /// The float value of the quantity that should be positive.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UndecidedBox {
    pub part: String,
    pub root: u32,
    pub path: String,
    pub bounds: HexBox,
}

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_depth: u32,
    pub max_boxes: u64,
}

pub(crate) enum RootOutcome {
    Done,
    Undecided(Vec<(String, Box2)>),
    Refuted(Counterexample),
    OutOfBoxes,
}

pub(crate) struct RootResult {
    pub root: u32,
    pub leaves: Vec<Leaf>,
    pub expanded: u64,
    pub depth: u32,
    pub outcome: RootOutcome,
}

struct Node {
    b: Box2,
    path: String,
}

impl Node {
    fn key(&self) -> (f64, f64, f64) {
        (self.b.max_width(), self.b.r3.lo(), self.b.r5.lo())
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Widest first; ties go to the lexicographically smaller lower corner.
    fn cmp(&self, other: &Self) -> Ordering {
        let (w1, a1, b1) = self.key();
        let (w2, a2, b2) = other.key();
        w1.total_cmp(&w2)
            .then(a2.total_cmp(&a1))
            .then(b2.total_cmp(&b1))
            .then(other.path.cmp(&self.path))
    }
}

const MAX_REPORTED_UNDECIDED: usize = 8;

pub(crate) fn search_root(
    ctx: &PartContext,
    grid: &Grid,
    root: u32,
    budget: Budget,
    counter: &AtomicU64,
) -> RootResult {
    let mut result = RootResult { root, leaves: Vec::new(), expanded: 0, depth: 0, outcome: RootOutcome::Done };
    let mut undecided = Vec::new();
    let mut heap = BinaryHeap::new();
    heap.push(Node { b: grid.cell(root as usize), path: String::new() });
    while let Some(Node { b, path }) = heap.pop() {
        result.expanded += 1;
        if counter.fetch_add(1, AtomicOrdering::Relaxed) >= budget.max_boxes {
            result.outcome = RootOutcome::OutOfBoxes;
            return result;
        }
        result.depth = result.depth.max(path.len() as u32);
        if let Some(status) = ctx.classify(&b) {
            result.leaves.push(Leaf { root, path, status });
            continue;
        }
        if let Some(cx) = ctx.counterexample(&b) {
            result.outcome = RootOutcome::Refuted(cx);
            return result;
        }
        if path.len() as u32 >= budget.max_depth {
            if undecided.len() < MAX_REPORTED_UNDECIDED {
                undecided.push((path, b));
            }
            continue;
        }
        let (lo, hi) = b.bisect();
        heap.push(Node { b: lo, path: format!("{path}0") });
        heap.push(Node { b: hi, path: format!("{path}1") });
    }
    if !undecided.is_empty() {
        result.outcome = RootOutcome::Undecided(undecided);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{region_def, region_plan};

    fn ctx(id: RegionId) -> PartContext {
        PartContext {
            region: region_def(id),
            band: None,
            checks: region_plan(id).parts[0].checks.clone(),
            b0: None,
        }
    }

    #[test]
    fn paths_replay_bisections() {
        let root = Box2::from_bounds(0.0, 1.0, 0.0, 0.5);
        assert_eq!(box_at(root, ""), Some(root));
        assert_eq!(box_at(root, "1"), Some(Box2::from_bounds(0.5, 1.0, 0.0, 0.5)));
        assert_eq!(box_at(root, "10"), Some(Box2::from_bounds(0.5, 0.75, 0.0, 0.5)));
        assert_eq!(box_at(root, "12"), None);
    }

    #[test]
    fn classification_examples() {
        let j1 = ctx(RegionId::J1);
        assert!(matches!(
            j1.classify(&Box2::from_bounds(0.4, 0.42, 0.4, 0.42)),
            Some(LeafStatus::Certified { .. })
        ));
        assert_eq!(j1.classify(&Box2::from_bounds(0.7, 0.8, 0.1, 0.2)), Some(LeafStatus::Outside));
        let j7 = PartContext { b0: Some(crate::regions::pentagon_box(0.02)), ..ctx(RegionId::J7) };
        assert_eq!(
            j7.classify(&Box2::from_bounds(0.985, 0.99, 0.985, 0.99)),
            Some(LeafStatus::InsideB0)
        );
    }

    #[test]
    fn reversed_pair_finds_a_counterexample() {
        let mut j1 = ctx(RegionId::J1);
        j1.checks = j1.checks.iter().map(|c| c.reversed()).collect();
        let b = Box2::from_bounds(0.4, 0.42, 0.4, 0.42);
        assert_eq!(j1.classify(&b), None);
        assert!(j1.counterexample(&b).is_some());
    }

    #[test]
    fn apex_box_is_decided_by_the_lemma() {
        let j4 = ctx(RegionId::J4);
        let hb = crate::model::golden_b() / 2.0;
        let b = Box2::from_bounds(hb - 1e-3, hb + 1e-3, 0.0, 2e-3);
        assert!(j4.check_bounds(&b).is_err() || j4.check_bounds(&b).unwrap()[0] <= 0.0);
        assert!(matches!(j4.classify(&b), Some(LeafStatus::ApexLemma { .. })));
    }
}
