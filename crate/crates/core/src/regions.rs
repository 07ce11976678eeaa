//! The admissible domain Ŝ, its sixteen subregions J1..J16, the λ
//! inequality each subregion is excluded by, box covers and a partition
//! audit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::interval::{pentagon_constants, Box2, Interval};
use crate::model::{in_domain, sqrt5, FreePoint};
use crate::potential::LambdaIndex;
use crate::solver::halton;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegionError {
    #[error("region {0} is unbounded; a truncation r5 <= T is required")]
    TruncationRequired(RegionId),
    #[error("unknown region `{0}` (expected S_hat or J1..J16)")]
    UnknownRegion(String),
    #[error("invalid cover parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionId {
    #[serde(rename = "S_hat")]
    SHat,
    J1,
    J2,
    J3,
    J4,
    J5,
    J6,
    J7,
    J8,
    J9,
    J10,
    J11,
    J12,
    J13,
    J14,
    J15,
    J16,
}

impl RegionId {
    pub const SUBREGIONS: [RegionId; 16] = [
        RegionId::J1,
        RegionId::J2,
        RegionId::J3,
        RegionId::J4,
        RegionId::J5,
        RegionId::J6,
        RegionId::J7,
        RegionId::J8,
        RegionId::J9,
        RegionId::J10,
        RegionId::J11,
        RegionId::J12,
        RegionId::J13,
        RegionId::J14,
        RegionId::J15,
        RegionId::J16,
    ];

    /// 1..=16 for the subregions, 0 for Ŝ.
    pub fn number(&self) -> usize {
        match self {
            RegionId::SHat => 0,
            other => RegionId::SUBREGIONS.iter().position(|r| r == other).unwrap() + 1,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, RegionId::SHat | RegionId::J9 | RegionId::J10 | RegionId::J15)
    }

    /// Whether the closure contains the pentagon point (1, 1).
    pub fn touches_pentagon(&self) -> bool {
        matches!(self, RegionId::J7 | RegionId::J8 | RegionId::J9 | RegionId::J16)
    }
}

impl fmt::Debug for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionId::SHat => write!(f, "S_hat"),
            other => write!(f, "J{}", other.number()),
        }
    }
}

impl FromStr for RegionId {
    type Err = RegionError;

    /// Accepts `S_hat`, `J7`, `j7` or `7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("s_hat") || t.eq_ignore_ascii_case("shat") {
            return Ok(RegionId::SHat);
        }
        let digits = t.strip_prefix(['J', 'j']).unwrap_or(t);
        match digits.parse::<usize>() {
            Ok(n) if (1..=16).contains(&n) => Ok(RegionId::SUBREGIONS[n - 1]),
            _ => Err(RegionError::UnknownRegion(s.to_string())),
        }
    }
}

/// A constant of the form `p + q √5`. Golden constants have dyadic `p`, `q`
/// and are therefore exact; decimal bounds such as 3.036 are taken to be
/// their nearest double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coef {
    pub p: f64,
    pub q: f64,
}

impl Coef {
    pub const ZERO: Coef = Coef::num(0.0);
    pub const ONE: Coef = Coef::num(1.0);
    pub const HALF_B: Coef = Coef { p: -0.5, q: 0.5 };
    pub const B: Coef = Coef { p: -1.0, q: 1.0 };
    pub const TWO_OVER_B: Coef = Coef { p: 0.5, q: 0.5 };
    pub const ONE_PLUS_B: Coef = Coef { p: 0.0, q: 1.0 };
    /// `(2 - b)/2`
    pub const ONE_MINUS_HALF_B: Coef = Coef { p: 1.5, q: -0.5 };

    pub const fn num(p: f64) -> Coef {
        Coef { p, q: 0.0 }
    }

    pub fn neg(self) -> Coef {
        Coef { p: -self.p, q: -self.q }
    }

    pub fn value(&self) -> f64 {
        if self.q == 0.0 {
            self.p
        } else {
            self.p + self.q * sqrt5()
        }
    }

    pub fn interval(&self) -> Interval {
        if self.q == 0.0 {
            return Interval::point(self.p);
        }
        Interval::point(self.p) + Interval::point(self.q) * pentagon_constants().sqrt5
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let named = [
            (Coef::HALF_B, "b/2"),
            (Coef::B, "b"),
            (Coef::TWO_OVER_B, "2/b"),
            (Coef::ONE_PLUS_B, "1+b"),
            (Coef::ONE_MINUS_HALF_B, "(2-b)/2"),
        ];
        for (c, name) in named {
            if *self == c {
                return write!(f, "{name}");
            }
            if *self == c.neg() {
                return write!(f, "-{name}");
            }
        }
        if self.q == 0.0 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "({} + {}·√5)", self.p, self.q)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Rel {
    fn holds(self, x: f64) -> bool {
        match self {
            Rel::Lt => x < 0.0,
            Rel::Le => x <= 0.0,
            Rel::Gt => x > 0.0,
            Rel::Ge => x >= 0.0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

/// `r3·c3 + r5·c5 + c0 (rel) 0`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub c3: Coef,
    pub c5: Coef,
    pub c0: Coef,
    pub rel: Rel,
}

impl Constraint {
    fn lower(var: Var, bound: Coef, strict: bool) -> Constraint {
        Constraint::axis(var, bound, if strict { Rel::Gt } else { Rel::Ge })
    }

    fn upper(var: Var, bound: Coef, strict: bool) -> Constraint {
        Constraint::axis(var, bound, if strict { Rel::Lt } else { Rel::Le })
    }

    fn axis(var: Var, bound: Coef, rel: Rel) -> Constraint {
        let (c3, c5) = match var {
            Var::R3 => (Coef::ONE, Coef::ZERO),
            Var::R5 => (Coef::ZERO, Coef::ONE),
        };
        Constraint { c3, c5, c0: bound.neg(), rel }
    }

    pub fn value(&self, p: FreePoint) -> f64 {
        self.c3.value() * p.r3 + self.c5.value() * p.r5 + self.c0.value()
    }

    pub fn holds(&self, p: FreePoint) -> bool {
        self.rel.holds(self.value(p))
    }

    /// Encloses the constraint expression over a box.
    pub fn enclose(&self, b: &Box2) -> Interval {
        self.c3.interval() * b.r3 + self.c5.interval() * b.r5 + self.c0.interval()
    }

    /// True when no point of the box satisfies the closed version of the
    /// constraint.
    pub fn excludes_box(&self, b: &Box2) -> bool {
        let e = self.enclose(b);
        match self.rel {
            Rel::Lt | Rel::Le => e.lo() > 0.0,
            Rel::Gt | Rel::Ge => e.hi() < 0.0,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (c, v) in [(self.c3, "r3"), (self.c5, "r5")] {
            if c == Coef::ONE {
                terms.push(v.to_string());
            } else if c == Coef::ONE.neg() {
                terms.push(format!("-{v}"));
            } else if c != Coef::ZERO {
                terms.push(format!("{c}·{v}"));
            }
        }
        if self.c0 != Coef::ZERO {
            terms.push(self.c0.to_string());
        }
        let lhs = terms.join(" + ").replace("+ -", "- ");
        write!(f, "{lhs} {} 0", self.rel.symbol())
    }
}

#[derive(Clone, Copy)]
enum Var {
    R3,
    R5,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    pub constraints: Vec<Constraint>,
    pub unbounded: bool,
    /// Window `[0, r3_max] × [0, r5_max]` intersected into the region.
    pub truncation: Option<Box2>,
}

impl Region {
    /// Membership honoring strictness; subregions additionally require Ŝ.
    pub fn contains(&self, p: FreePoint) -> bool {
        if self.id != RegionId::SHat && !in_domain(p) {
            return false;
        }
        if let Some(w) = &self.truncation {
            if !w.contains(p.r3, p.r5) {
                return false;
            }
        }
        self.constraints.iter().all(|c| c.holds(p))
    }

    /// True when the box provably misses the closure of the region.
    pub fn excludes_box(&self, b: &Box2) -> bool {
        if let Some(w) = &self.truncation {
            if w.r3.intersect(&b.r3).is_none() || w.r5.intersect(&b.r5).is_none() {
                return true;
            }
        }
        self.constraints.iter().any(|c| c.excludes_box(b))
    }

    pub fn truncated(mut self, r5_max: f64) -> Region {
        self.truncation = Some(truncation_window(r5_max));
        self
    }

    /// Outward-rounded bounding rectangle of the (truncated) closure.
    pub fn bounding_rect(&self) -> Result<Box2, RegionError> {
        let r5_max = match (&self.truncation, self.unbounded) {
            (Some(w), _) => Some(w.r5.hi()),
            (None, true) => return Err(RegionError::TruncationRequired(self.id)),
            (None, false) => None,
        };
        Ok(rect_of(self.id, r5_max))
    }
}

/// The window `[0, (2/a) T + 1] × [0, T]`, which contains Ŝ ∩ {r5 <= T}.
pub fn truncation_window(r5_max: f64) -> Box2 {
    let r3_max = slant_r3(Interval::point(r5_max)).hi();
    Box2::from_bounds(0.0, r3_max, 0.0, r5_max)
}

/// `(2/a) r5 + 1`, the `r3` coordinate of the r4 = 0 boundary at height r5.
fn slant_r3(r5: Interval) -> Interval {
    Coef::HALF_B.interval() * r5 + Interval::ONE
}

const R5_J11_J15: f64 = 3.036;
const R3_J12_J13: f64 = 1.3;
const R5_J13_J16: f64 = 1.4;
const R5_J12_J14: f64 = 2.05;

fn rect_of(id: RegionId, r5_max: Option<f64>) -> Box2 {
    use RegionId::*;
    let c = |x: Coef| x.interval();
    let n = |x: f64| Interval::point(x);
    let t = || n(r5_max.expect("truncation checked by caller"));
    let zero = Interval::ZERO;
    let one = Interval::ONE;
    let (r3lo, r3hi, r5lo, r5hi) = match id {
        SHat => (zero, slant_r3(t()), zero, t()),
        J1 => (zero, c(Coef::HALF_B), zero, c(Coef::HALF_B)),
        J2 => (zero, c(Coef::HALF_B), c(Coef::HALF_B), one),
        J3 => (c(Coef::HALF_B), one, c(Coef::ONE_MINUS_HALF_B), c(Coef::HALF_B)),
        J4 => (c(Coef::HALF_B), one, zero, c(Coef::ONE_MINUS_HALF_B)),
        J5 => (one, c(Coef::B), c(Coef::ONE_MINUS_HALF_B), c(Coef::HALF_B)),
        J6 => (c(Coef::B), one + c(Coef::HALF_B), c(Coef::HALF_B), one),
        J7 => (c(Coef::HALF_B), one, c(Coef::HALF_B), one),
        J8 => (one, c(Coef::B), c(Coef::HALF_B), one),
        J9 => (zero, one, one, t()),
        J10 => (one, c(Coef::TWO_OVER_B), c(Coef::ONE_PLUS_B), t()),
        J11 => (
            c(Coef::TWO_OVER_B),
            slant_r3(n(R5_J11_J15)),
            one,
            n(R5_J11_J15),
        ),
        J12 => (n(R3_J12_J13), c(Coef::TWO_OVER_B), one, n(R5_J12_J14)),
        J13 => (one, n(R3_J12_J13), n(R5_J13_J16), n(R5_J12_J14)),
        J14 => (one, c(Coef::TWO_OVER_B), n(R5_J12_J14), c(Coef::ONE_PLUS_B)),
        J15 => (c(Coef::TWO_OVER_B), slant_r3(t()), n(R5_J11_J15), t()),
        J16 => (one, n(R3_J12_J13), one, n(R5_J13_J16)),
    };
    Box2::from_bounds(r3lo.lo(), r3hi.hi(), r5lo.lo(), r5hi.hi())
}

/// The constraint list of a region as printed, except that the lower `r3`
/// bound of J11 is `2/b` (see [`region_def_printed_j11`]).
pub fn region_def(id: RegionId) -> Region {
    use RegionId::*;
    use Var::{R3, R5};
    let lo = Constraint::lower;
    let up = Constraint::upper;
    let num = Coef::num;
    // r3 < r5 + b/2
    let below_r2_line = Constraint {
        c3: Coef::ONE,
        c5: Coef::ONE.neg(),
        c0: Coef::HALF_B.neg(),
        rel: Rel::Lt,
    };
    // r3 < (2/a) r5 + 1
    let below_r4_line = Constraint {
        c3: Coef::ONE,
        c5: Coef::HALF_B.neg(),
        c0: Coef::ONE.neg(),
        rel: Rel::Lt,
    };
    let constraints = match id {
        SHat => vec![
            lo(R3, Coef::ZERO, true),
            lo(R5, Coef::ZERO, true),
            // r5 - r3 + b/2 > 0
            Constraint { c3: Coef::ONE.neg(), c5: Coef::ONE, c0: Coef::HALF_B, rel: Rel::Gt },
            // r5 - φ r3 + φ > 0
            Constraint {
                c3: Coef::TWO_OVER_B.neg(),
                c5: Coef::ONE,
                c0: Coef::TWO_OVER_B,
                rel: Rel::Gt,
            },
        ],
        J1 => vec![
            lo(R3, Coef::ZERO, true),
            up(R3, Coef::HALF_B, false),
            lo(R5, Coef::ZERO, true),
            up(R5, Coef::HALF_B, false),
        ],
        J2 => vec![
            lo(R3, Coef::ZERO, true),
            up(R3, Coef::HALF_B, false),
            lo(R5, Coef::HALF_B, true),
            up(R5, Coef::ONE, false),
        ],
        J3 => vec![
            lo(R3, Coef::HALF_B, true),
            up(R3, Coef::ONE, true),
            lo(R5, Coef::ONE_MINUS_HALF_B, false),
            up(R5, Coef::HALF_B, true),
        ],
        J4 => vec![
            lo(R3, Coef::HALF_B, true),
            below_r2_line,
            lo(R5, Coef::ZERO, false),
            up(R5, Coef::ONE_MINUS_HALF_B, true),
        ],
        J5 => vec![
            lo(R3, Coef::ONE, true),
            below_r2_line,
            lo(R5, Coef::ONE_MINUS_HALF_B, false),
            up(R5, Coef::HALF_B, true),
        ],
        J6 => vec![
            lo(R3, Coef::B, true),
            below_r2_line,
            // r5 >= r3 - b/2
            Constraint { c3: Coef::ONE.neg(), c5: Coef::ONE, c0: Coef::HALF_B, rel: Rel::Ge },
            up(R5, Coef::ONE, true),
        ],
        J7 => vec![
            lo(R3, Coef::HALF_B, true),
            up(R3, Coef::ONE, true),
            lo(R5, Coef::HALF_B, false),
            up(R5, Coef::ONE, true),
        ],
        J8 => vec![
            lo(R3, Coef::ONE, true),
            up(R3, Coef::B, true),
            lo(R5, Coef::HALF_B, false),
            up(R5, Coef::ONE, true),
        ],
        J9 => vec![
            lo(R3, Coef::ZERO, true),
            up(R3, Coef::ONE, true),
            lo(R5, Coef::ONE, false),
        ],
        J10 => vec![
            lo(R3, Coef::ONE, true),
            up(R3, Coef::TWO_OVER_B, true),
            lo(R5, Coef::ONE_PLUS_B, false),
        ],
        J11 => vec![
            lo(R3, Coef::TWO_OVER_B, true),
            below_r4_line,
            lo(R5, Coef::ONE, false),
            up(R5, num(R5_J11_J15), true),
        ],
        J12 => vec![
            lo(R3, num(R3_J12_J13), true),
            up(R3, Coef::TWO_OVER_B, true),
            lo(R5, Coef::ONE, false),
            up(R5, num(R5_J12_J14), true),
        ],
        J13 => vec![
            lo(R3, Coef::ONE, true),
            up(R3, num(R3_J12_J13), true),
            lo(R5, num(R5_J13_J16), false),
            up(R5, num(R5_J12_J14), true),
        ],
        J14 => vec![
            lo(R3, Coef::ONE, true),
            up(R3, Coef::TWO_OVER_B, true),
            lo(R5, num(R5_J12_J14), false),
            up(R5, Coef::ONE_PLUS_B, true),
        ],
        J15 => vec![
            lo(R3, Coef::TWO_OVER_B, true),
            below_r4_line,
            lo(R5, num(R5_J11_J15), false),
        ],
        J16 => vec![
            lo(R3, Coef::ONE, true),
            up(R3, num(R3_J12_J13), true),
            lo(R5, Coef::ONE, true),
            up(R5, num(R5_J13_J16), true),
        ],
    };
    Region { id, constraints, unbounded: id.is_unbounded(), truncation: None }
}

/// J11 exactly as printed, with lower bound `b/2 < r3`. That set overlaps
/// J9, J12, J13 and J16; kept for the audit that demonstrates it.
pub fn region_def_printed_j11() -> Region {
    let mut r = region_def(RegionId::J11);
    r.constraints[0] = Constraint::lower(Var::R3, Coef::HALF_B, true);
    r
}

/// One inequality that rules out central configurations on a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `λ_smaller < λ_larger` everywhere.
    Pair { smaller: LambdaIndex, larger: LambdaIndex },
    /// `λ ≠ 0` everywhere.
    Nonvanishing { index: LambdaIndex },
}

impl Check {
    pub fn pair(smaller: &str, larger: &str) -> Check {
        Check::Pair { smaller: smaller.parse().unwrap(), larger: larger.parse().unwrap() }
    }

    pub fn reversed(self) -> Check {
        match self {
            Check::Pair { smaller, larger } => Check::Pair { smaller: larger, larger: smaller },
            other => other,
        }
    }

    /// Whether the check alone excludes a central configuration.
    pub fn excludes_cc(&self) -> bool {
        matches!(self, Check::Pair { .. })
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pair { smaller, larger } => write!(f, "{smaller} < {larger}"),
            Check::Nonvanishing { index } => write!(f, "{index} != 0"),
        }
    }
}

/// A piece of a region plan: the region, optionally restricted to an `r3`
/// band, and the checks certified there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanPart {
    pub label: String,
    /// Closed `r3` band `[lo, hi]`.
    pub r3_band: Option<(f64, f64)>,
    pub checks: Vec<Check>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPlan {
    pub region: RegionId,
    pub parts: Vec<PlanPart>,
}

impl RegionPlan {
    /// Every pair turned around; used as a negative control.
    pub fn reversed(&self) -> RegionPlan {
        let mut out = self.clone();
        for part in &mut out.parts {
            for c in &mut part.checks {
                *c = c.reversed();
            }
        }
        out
    }

    /// The single pair of a non-composite plan.
    pub fn single_pair(&self) -> Option<(LambdaIndex, LambdaIndex)> {
        match self.parts.as_slice() {
            [part] => match part.checks.as_slice() {
                [Check::Pair { smaller, larger }] => Some((*smaller, *larger)),
                _ => None,
            },
            _ => None,
        }
    }
}

pub const J16_BREAKPOINTS: [f64; 3] = [1.13067, 1.152781, 1.201923];

pub fn region_plan(id: RegionId) -> RegionPlan {
    use RegionId::*;
    let single = |s: &str, l: &str| RegionPlan {
        region: id,
        parts: vec![PlanPart {
            label: id.to_string(),
            r3_band: None,
            checks: vec![Check::pair(s, l)],
            note: None,
        }],
    };
    match id {
        SHat => RegionPlan { region: id, parts: vec![] },
        J1 => single("11", "31"),
        J2 => single("41", "31"),
        J3 | J4 | J5 => single("11", "52"),
        J6 | J14 => single("31", "11"),
        J7 => single("42", "52"),
        J8 => single("32", "22"),
        J9 | J10 => single("41", "11"),
        J11 | J12 | J13 => single("51", "11"),
        J15 => single("52", "11"),
        J16 => {
            let [p1, p2, p3] = J16_BREAKPOINTS;
            let band = |label: &str, lo: f64, hi: f64, checks: Vec<Check>, note: Option<&str>| {
                PlanPart {
                    label: label.to_string(),
                    r3_band: Some((lo, hi)),
                    checks,
                    note: note.map(str::to_string),
                }
            };
            let l21: LambdaIndex = "21".parse().unwrap();
            RegionPlan {
                region: id,
                parts: vec![
                    band("J16a", 1.0, p1, vec![Check::pair("21", "41")], None),
                    band("J16b", p1, p2, vec![Check::pair("21", "11")], None),
                    band(
                        "J16c",
                        p2,
                        p3,
                        vec![Check::Nonvanishing { index: l21 }, Check::pair("21", "11")],
                        Some(
                            "λ21 != 0 alone does not exclude a central configuration; \
                             λ21 < λ11 is certified on this band as well",
                        ),
                    ),
                    band("J16d", p3, R3_J12_J13, vec![Check::pair("31", "11")], None),
                ],
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverOptions {
    pub max_box_width: f64,
    /// Truncation `r5 <= T`, required for unbounded regions.
    pub truncation: Option<f64>,
    /// Half-width of the excised square `B0` around (1, 1); 0 disables it.
    pub delta: f64,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions { max_box_width: 0.02, truncation: Some(10.0), delta: 0.02 }
    }
}

/// `B0 = [1-δ, 1+δ]²`
pub fn pentagon_box(delta: f64) -> Box2 {
    Box2::from_bounds(1.0 - delta, 1.0 + delta, 1.0 - delta, 1.0 + delta)
}

/// A uniform grid over a rectangle with cells no wider than `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub rect: Box2,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(rect: Box2, w: f64) -> Grid {
        let count = |x: Interval| ((x.width() / w).ceil() as usize).max(1);
        Grid { rect, nx: count(rect.r3), ny: count(rect.r5) }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell `k`, row-major with `r3` varying fastest. Neighbouring cells
    /// share bit-identical edges and the outer edges are the rectangle's.
    pub fn cell(&self, k: usize) -> Box2 {
        let (i, j) = (k % self.nx, k / self.nx);
        let edge = |x: Interval, i: usize, n: usize| {
            if i == n {
                x.hi()
            } else {
                x.lo() + x.width() * (i as f64 / n as f64)
            }
        };
        Box2::from_bounds(
            edge(self.rect.r3, i, self.nx),
            edge(self.rect.r3, i + 1, self.nx),
            edge(self.rect.r5, j, self.ny),
            edge(self.rect.r5, j + 1, self.ny),
        )
    }
}

/// Closed boxes whose union contains the closure of the (truncated) region,
/// minus the interior of `B0` when the closure touches (1, 1). Boxes along
/// slanted edges may extend past the region; none misses it entirely.
pub fn cover(id: RegionId, opts: &CoverOptions) -> Result<Vec<Box2>, RegionError> {
    if !(opts.max_box_width > 0.0 && opts.max_box_width.is_finite()) {
        return Err(RegionError::InvalidParameter(format!(
            "max_box_width must be positive, got {}",
            opts.max_box_width
        )));
    }
    let mut region = region_def(id);
    if let Some(t) = opts.truncation.filter(|_| region.unbounded) {
        region = region.truncated(t);
    }
    let grid = Grid::new(region.bounding_rect()?, opts.max_box_width);
    let b0 = (opts.delta > 0.0 && id.touches_pentagon()).then(|| pentagon_box(opts.delta));
    Ok((0..grid.len())
        .map(|k| grid.cell(k))
        .filter(|b| !region.excludes_box(b))
        .filter(|b| b0.is_none_or(|b0| !b.subset_of(&b0)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    pub r3: f64,
    pub r5: f64,
    pub regions: Vec<RegionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub window: Box2,
    pub samples: usize,
    pub in_domain: usize,
    pub uncovered: usize,
    pub exactly_one: usize,
    pub multiple: usize,
    /// Hits per region, in the order J1..J16.
    pub per_region: Vec<(RegionId, usize)>,
    pub uncovered_fraction: f64,
    /// First anomalies found (points in zero or several regions).
    pub anomalies: Vec<Anomaly>,
}

const MAX_ANOMALIES: usize = 100;

/// Classifies `samples` Halton points of the window that lie in Ŝ by the
/// number of subregions containing them.
pub fn partition_audit(samples: usize, window: &Box2) -> PartitionReport {
    let regions: Vec<Region> = RegionId::SUBREGIONS.iter().map(|&id| region_def(id)).collect();
    partition_audit_of(&regions, samples, window)
}

pub fn partition_audit_of(regions: &[Region], samples: usize, window: &Box2) -> PartitionReport {
    let mut report = PartitionReport {
        window: *window,
        samples,
        in_domain: 0,
        uncovered: 0,
        exactly_one: 0,
        multiple: 0,
        per_region: regions.iter().map(|r| (r.id, 0)).collect(),
        uncovered_fraction: 0.0,
        anomalies: Vec::new(),
    };
    for k in 1..=samples as u64 {
        let p = FreePoint::new(
            window.r3.lo() + window.r3.width() * halton(k, 2),
            window.r5.lo() + window.r5.width() * halton(k, 3),
        );
        if !in_domain(p) {
            continue;
        }
        report.in_domain += 1;
        let mut hits = Vec::new();
        for (slot, r) in regions.iter().enumerate() {
            if r.contains(p) {
                hits.push(r.id);
                report.per_region[slot].1 += 1;
            }
        }
        match hits.len() {
            0 => report.uncovered += 1,
            1 => report.exactly_one += 1,
            _ => report.multiple += 1,
        }
        if hits.len() != 1 && report.anomalies.len() < MAX_ANOMALIES {
            report.anomalies.push(Anomaly { r3: p.r3, r5: p.r5, regions: hits });
        }
    }
    if report.in_domain > 0 {
        report.uncovered_fraction = report.uncovered as f64 / report.in_domain as f64;
    }
    report
}

/// The region containing a point, if exactly one does.
pub fn locate(p: FreePoint) -> Option<RegionId> {
    let mut found = RegionId::SUBREGIONS.iter().filter(|&&id| region_def(id).contains(p));
    match (found.next(), found.next()) {
        (Some(&id), None) => Some(id),
        _ => None,
    }
}

/// JSON-friendly description of a region: its constraints both structured
/// and as text, its plan and its bounding rectangle.
#[derive(Debug, Clone, Serialize)]
pub struct RegionExport {
    pub region: Region,
    pub constraints_text: Vec<String>,
    pub plan: RegionPlan,
    pub bounding_rect: Box2,
}

pub fn export_regions(truncation: f64) -> Vec<RegionExport> {
    RegionId::SUBREGIONS
        .iter()
        .map(|&id| {
            let mut region = region_def(id);
            if region.unbounded {
                region = region.truncated(truncation);
            }
            RegionExport {
                constraints_text: region.constraints.iter().map(|c| c.to_string()).collect(),
                plan: region_plan(id),
                bounding_rect: region.bounding_rect().expect("truncated"),
                region,
            }
        })
        .collect()
}
