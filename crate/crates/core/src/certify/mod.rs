//! Certification that no central configuration other than (1, 1) exists
//! in Ŝ (up to the truncation window): branch-and-bound proofs of the
//! region inequalities, a Krawczyk uniqueness test around (1, 1), bundle
//! files and an independent re-verifier.

mod apex;
mod engine;
mod hexfloat;
mod local;
mod verify;

use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicU64;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use apex::{contains_apex, lambda52_lower_bound};
pub use engine::{box_at, Budget, Counterexample, Leaf, LeafStatus, PartContext, UndecidedBox};
pub use hexfloat::{HexBox, HexF64, HexInterval};
pub use local::{certify_local_uniqueness, subsystem, LocalUniquenessCertificate};
pub use verify::{verify_certificate, verify_local, verify_region, Verdict, VerifyError};

use crate::interval::pentagon_constants;
use crate::model::FreePoint;
use crate::potential::lambda_component;
use crate::regions::{
    partition_audit, pentagon_box, region_def, region_plan, truncation_window, Check, Grid,
    PartitionReport, RegionError, RegionId, RegionPlan,
};
use crate::solver::halton;
use engine::{search_root, RootOutcome};

pub const FORMAT_REGION: &str = "starcc-region-certificate";
pub const FORMAT_LOCAL: &str = "starcc-local-certificate";
pub const FORMAT_MANIFEST: &str = "starcc-bundle-manifest";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("{region}: budget exhausted after {boxes_expanded} boxes; {} undecided boxes reported", undecided.len())]
    BudgetExhausted {
        region: RegionId,
        boxes_expanded: u64,
        undecided: Vec<UndecidedBox>,
    },
    #[error("{region}: check `{}` fails at ({}, {}) (value {})", counterexample.check, counterexample.r3, counterexample.r5, counterexample.value)]
    Refuted {
        region: RegionId,
        part: String,
        counterexample: Counterexample,
    },
    #[error("Krawczyk test failed on B0: {0}")]
    ContractionFailure(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{} region(s) failed: {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Aggregate(Vec<CertifyError>),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CertifyError {
    /// Whether the failure (or every aggregated failure) is a budget issue.
    pub fn is_budget(&self) -> bool {
        match self {
            CertifyError::BudgetExhausted { .. } => true,
            CertifyError::Aggregate(v) => v.iter().all(|e| e.is_budget()),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyConfig {
    pub max_box_width: f64,
    pub max_depth: u32,
    pub max_boxes: u64,
    /// Half-width of `B0 = [1-δ, 1+δ]²`; 0 disables the excision.
    pub delta: f64,
    pub truncation_r5: f64,
    /// Float samples per unbounded region for the tail spot check.
    pub tail_samples: usize,
    /// Quasi-random samples of the partition audit in [`certify_all`].
    pub audit_samples: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            max_box_width: 0.02,
            max_depth: 30,
            max_boxes: 200_000_000,
            delta: 0.02,
            truncation_r5: 10.0,
            tail_samples: 4096,
            audit_samples: 1_000_000,
        }
    }
}

impl CertifyConfig {
    pub fn validate(&self) -> Result<(), CertifyError> {
        let bad = |m: String| Err(CertifyError::InvalidConfig(m));
        if !(self.max_box_width > 0.0 && self.max_box_width <= 1.0) {
            return bad(format!("max_box_width must lie in (0, 1], got {}", self.max_box_width));
        }
        if !(0.0..0.5).contains(&self.delta) {
            return bad(format!("delta must lie in [0, 0.5), got {}", self.delta));
        }
        if !(self.truncation_r5 > 1.0 + crate::model::golden_b() && self.truncation_r5.is_finite()) {
            return bad(format!("truncation r5 must exceed 1+b, got {}", self.truncation_r5));
        }
        if self.max_boxes == 0 {
            return bad("max_boxes must be positive".into());
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget { max_depth: self.max_depth, max_boxes: self.max_boxes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartCertificate {
    pub label: String,
    pub r3_band: Option<[HexF64; 2]>,
    pub checks: Vec<Check>,
    pub rect: HexBox,
    pub nx: usize,
    pub ny: usize,
    pub min_gap: HexF64,
    pub leaves: Vec<Leaf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub boxes_expanded: u64,
    pub leaves: usize,
    pub certified_leaves: usize,
    pub max_depth: u32,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub u_range: [f64; 2],
    pub samples: usize,
    pub min_gap: f64,
    pub min_gap_at: [f64; 2],
    pub nonpositive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub version: u32,
    pub fingerprint: String,
    pub region: RegionId,
    pub plan: RegionPlan,
    pub max_box_width: HexF64,
    pub truncation_r5: Option<HexF64>,
    pub excluded: Option<HexBox>,
    /// Smallest certified lower bound over all leaves, bit-exact.
    pub min_gap: HexF64,
    /// The same bound in decimal, for readers.
    pub min_gap_decimal: f64,
    pub stats: Stats,
    pub tail_check: Option<TailReport>,
    pub parts: Vec<PartCertificate>,
}

impl Certificate {
    pub fn leaf_count(&self) -> usize {
        self.parts.iter().map(|p| p.leaves.len()).sum()
    }
}

/// Identifies the arithmetic kernel: crate version plus the bit patterns of
/// every pentagon constant enclosure.
pub fn fingerprint() -> String {
    let k = pentagon_constants();
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    let mut all = vec![k.sqrt5, k.a, k.b, k.phi, k.half_b, k.two_over_a, k.two_over_b];
    all.extend(k.cos);
    all.extend(k.sin);
    for x in all {
        h.update(x.lo().to_bits().to_le_bytes());
        h.update(x.hi().to_bits().to_le_bytes());
    }
    let digest = h.finalize();
    digest[..12].iter().map(|b| format!("{b:02x}")).collect()
}

/// The part contexts of a region under a configuration, in plan order.
pub fn part_contexts(
    plan: &RegionPlan,
    truncation_r5: Option<f64>,
    b0: Option<crate::interval::Box2>,
) -> Vec<PartContext> {
    let mut region = region_def(plan.region);
    if let (true, Some(t)) = (region.unbounded, truncation_r5) {
        region = region.truncated(t);
    }
    plan.parts
        .iter()
        .map(|p| PartContext { region: region.clone(), band: p.r3_band, checks: p.checks.clone(), b0 })
        .collect()
}

fn excluded_box(id: RegionId, delta: f64) -> Option<crate::interval::Box2> {
    (delta > 0.0 && id.touches_pentagon()).then(|| pentagon_box(delta))
}

/// Proves every check of the plan on the (truncated) region by adaptive
/// bisection of a uniform grid of root boxes.
pub fn certify_inequality(
    id: RegionId,
    plan: &RegionPlan,
    config: &CertifyConfig,
) -> Result<Certificate, CertifyError> {
    config.validate()?;
    if id == RegionId::SHat || plan.region != id {
        return Err(CertifyError::InvalidConfig(format!("no plan for {id}")));
    }
    let start = Instant::now();
    let region = region_def(id);
    let truncation = region.unbounded.then_some(config.truncation_r5);
    let b0 = excluded_box(id, config.delta);
    let counter = AtomicU64::new(0);
    let mut parts = Vec::new();
    let mut stats = Stats { boxes_expanded: 0, leaves: 0, certified_leaves: 0, max_depth: 0, wall_time_s: 0.0 };
    let mut failures = Vec::new();
    let mut undecided = Vec::new();

    for (ctx, plan_part) in part_contexts(plan, truncation, b0).iter().zip(&plan.parts) {
        let grid = Grid::new(ctx.rect()?, config.max_box_width);
        let results: Vec<_> = (0..grid.len() as u32)
            .into_par_iter()
            .map(|root| search_root(ctx, &grid, root, config.budget(), &counter))
            .collect();
        let mut leaves = Vec::new();
        for r in results {
            stats.boxes_expanded += r.expanded;
            stats.max_depth = stats.max_depth.max(r.depth);
            match r.outcome {
                RootOutcome::Done => {}
                RootOutcome::Refuted(cx) => failures.push(CertifyError::Refuted {
                    region: id,
                    part: plan_part.label.clone(),
                    counterexample: cx,
                }),
                RootOutcome::Undecided(boxes) => {
                    for (path, b) in boxes {
                        undecided.push(UndecidedBox {
                            part: plan_part.label.clone(),
                            root: r.root,
                            path,
                            bounds: b.into(),
                        });
                    }
                }
                RootOutcome::OutOfBoxes => {}
            }
            leaves.extend(r.leaves);
        }
        leaves.sort_by(|a, b| (a.root, &a.path).cmp(&(b.root, &b.path)));
        let min_gap = leaves.iter().filter_map(Leaf::lower_bound).fold(f64::INFINITY, f64::min);
        stats.leaves += leaves.len();
        stats.certified_leaves += leaves.iter().filter(|l| l.lower_bound().is_some()).count();
        parts.push(PartCertificate {
            label: plan_part.label.clone(),
            r3_band: plan_part.r3_band.map(|(lo, hi)| [HexF64(lo), HexF64(hi)]),
            checks: plan_part.checks.clone(),
            rect: grid.rect.into(),
            nx: grid.nx,
            ny: grid.ny,
            min_gap: HexF64(min_gap),
            leaves,
        });
    }

    if let Some(first) = failures.into_iter().next() {
        return Err(first);
    }
    let out_of_boxes = counter.load(std::sync::atomic::Ordering::Relaxed) >= config.max_boxes;
    if !undecided.is_empty() || out_of_boxes {
        return Err(CertifyError::BudgetExhausted { region: id, boxes_expanded: stats.boxes_expanded, undecided });
    }
    let min_gap = parts.iter().map(|p| p.min_gap.0).fold(f64::INFINITY, f64::min);
    stats.wall_time_s = start.elapsed().as_secs_f64();
    Ok(Certificate {
        format: FORMAT_REGION.to_string(),
        version: FORMAT_VERSION,
        fingerprint: fingerprint(),
        region: id,
        plan: plan.clone(),
        max_box_width: HexF64(config.max_box_width),
        truncation_r5: truncation.map(HexF64),
        excluded: b0.map(Into::into),
        min_gap: HexF64(min_gap),
        min_gap_decimal: min_gap,
        stats,
        tail_check: region
            .unbounded
            .then(|| tail_spot_check(id, plan, config.tail_samples)),
        parts,
    })
}

/// Non-rigorous float check of an unbounded region beyond the truncation,
/// sampled in `u = 1/r5 ∈ [1e-6, 0.1]` (log-uniform) and across the region
/// width at each height.
pub fn tail_spot_check(id: RegionId, plan: &RegionPlan, samples: usize) -> TailReport {
    let region = region_def(id);
    let rect_lo = region
        .clone()
        .truncated(10.0)
        .bounding_rect()
        .expect("truncated region has a rectangle")
        .r3
        .lo();
    let mut report = TailReport {
        u_range: [1e-6, 0.1],
        samples: 0,
        min_gap: f64::INFINITY,
        min_gap_at: [f64::NAN; 2],
        nonpositive: 0,
    };
    for k in 1..=samples as u64 {
        let u = 10f64.powf(-6.0 + 5.0 * halton(k, 2));
        let r5 = 1.0 / u;
        let r3_hi = match id {
            RegionId::J9 => 1.0,
            RegionId::J10 => 2.0 / crate::model::golden_b(),
            _ => crate::model::golden_b() / 2.0 * r5 + 1.0,
        };
        let p = FreePoint::new(rect_lo + (r3_hi - rect_lo) * halton(k, 3), r5);
        if !region.contains(p) {
            continue;
        }
        let gap = plan
            .parts
            .iter()
            .flat_map(|part| &part.checks)
            .filter_map(|c| match *c {
                Check::Pair { smaller, larger } => {
                    Some(lambda_component(larger, p).ok()? - lambda_component(smaller, p).ok()?)
                }
                Check::Nonvanishing { .. } => None,
            })
            .fold(f64::INFINITY, f64::min);
        report.samples += 1;
        if gap <= 0.0 {
            report.nonpositive += 1;
        }
        if gap < report.min_gap {
            report.min_gap = gap;
            report.min_gap_at = [p.r3, p.r5];
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub region: Option<RegionId>,
    pub file: String,
    pub sha256: String,
    pub min_gap: Option<f64>,
    pub leaves: Option<usize>,
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub fingerprint: String,
    pub verdict: String,
    pub window: HexBox,
    pub config: CertifyConfig,
    pub entries: Vec<ManifestEntry>,
    pub local: ManifestEntry,
    pub partition_audit: PartitionReport,
    pub wall_time_s: f64,
}

pub const VERDICT_UNIQUE: &str = "UNIQUE-IN-WINDOW";

/// Everything [`certify_all`] produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub certificates: Vec<Certificate>,
    pub local: LocalUniquenessCertificate,
    pub audit: PartitionReport,
    pub config: CertifyConfig,
    pub wall_time_s: f64,
}

impl Bundle {
    /// `UNIQUE-IN-WINDOW` with the window stated.
    pub fn verdict(&self) -> String {
        format!(
            "{VERDICT_UNIQUE}: (1,1) is the only star central configuration with r5 <= {}",
            self.config.truncation_r5
        )
    }

    /// Writes `J1.json` .. `J16.json`, `local.json` and `manifest.json`.
    pub fn write(&self, dir: &Path) -> Result<Manifest, CertifyError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CertifyError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut entries = Vec::new();
        for c in &self.certificates {
            let file = format!("{}.json", c.region);
            let bytes = serde_json::to_vec(c).expect("certificate serializes");
            let path = dir.join(&file);
            std::fs::write(&path, &bytes).map_err(io(&path))?;
            entries.push(ManifestEntry {
                region: Some(c.region),
                file,
                sha256: sha256_hex(&bytes),
                min_gap: Some(c.min_gap_decimal),
                leaves: Some(c.leaf_count()),
                wall_time_s: Some(c.stats.wall_time_s),
            });
        }
        let bytes = serde_json::to_vec_pretty(&self.local).expect("certificate serializes");
        let path = dir.join("local.json");
        std::fs::write(&path, &bytes).map_err(io(&path))?;
        let local = ManifestEntry {
            region: None,
            file: "local.json".into(),
            sha256: sha256_hex(&bytes),
            min_gap: None,
            leaves: None,
            wall_time_s: None,
        };
        let manifest = Manifest {
            format: FORMAT_MANIFEST.into(),
            version: FORMAT_VERSION,
            fingerprint: fingerprint(),
            verdict: self.verdict(),
            window: truncation_window(self.config.truncation_r5).into(),
            config: self.config,
            entries,
            local,
            partition_audit: self.audit.clone(),
            wall_time_s: self.wall_time_s,
        };
        let path = dir.join("manifest.json");
        let bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, bytes).map_err(io(&path))?;
        Ok(manifest)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// All sixteen region certificates, the local uniqueness certificate and
/// the partition audit. Every region is attempted; failures are aggregated.
pub fn certify_all(config: &CertifyConfig) -> Result<Bundle, CertifyError> {
    config.validate()?;
    let start = Instant::now();
    let local = certify_local_uniqueness(config.delta)?;
    let mut certificates = Vec::new();
    let mut failures = Vec::new();
    for id in RegionId::SUBREGIONS {
        match certify_inequality(id, &region_plan(id), config) {
            Ok(c) => certificates.push(c),
            Err(e) => failures.push(e),
        }
    }
    if !failures.is_empty() {
        return Err(CertifyError::Aggregate(failures));
    }
    let audit = partition_audit(config.audit_samples, &truncation_window(config.truncation_r5));
    Ok(Bundle { certificates, local, audit, config: *config, wall_time_s: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> CertifyConfig {
        CertifyConfig { max_box_width: 0.05, ..CertifyConfig::default() }
    }

    #[test]
    fn fingerprint_is_stable() {
        assert_eq!(fingerprint(), fingerprint());
        assert_eq!(fingerprint().len(), 24);
    }

    #[test]
    fn j4_certifies_with_a_large_gap() {
        let c = certify_inequality(RegionId::J4, &region_plan(RegionId::J4), &quick()).unwrap();
        assert!(c.min_gap.0 > 0.5 && c.min_gap.0 < 3.3, "{}", c.min_gap.0);
        let apex = c.parts[0]
            .leaves
            .iter()
            .filter(|l| matches!(l.status, LeafStatus::ApexLemma { .. }))
            .count();
        assert_eq!(apex, 1);
    }

    #[test]
    fn j6_gap_is_consistent_with_the_printed_bounds() {
        let c = certify_inequality(RegionId::J6, &region_plan(RegionId::J6), &quick()).unwrap();
        assert!(c.min_gap.0 > 0.0 && c.min_gap.0 < 1.84995 - 1.60778 + 0.4);
    }

    #[test]
    fn reversed_orientation_is_refuted() {
        let plan = region_plan(RegionId::J2).reversed();
        let err = certify_inequality(RegionId::J2, &plan, &quick()).unwrap_err();
        assert!(matches!(err, CertifyError::Refuted { .. }), "{err}");
    }

    #[test]
    fn tiny_depth_exhausts_the_budget() {
        let cfg = CertifyConfig { max_depth: 2, max_box_width: 0.5, ..quick() };
        let err = certify_inequality(RegionId::J7, &region_plan(RegionId::J7), &cfg).unwrap_err();
        assert!(err.is_budget(), "{err}");
    }

    #[test]
    fn config_validation() {
        assert!(CertifyConfig { delta: 0.6, ..quick() }.validate().is_err());
        assert!(CertifyConfig { max_box_width: 0.0, ..quick() }.validate().is_err());
        assert!(CertifyConfig { truncation_r5: 2.0, ..quick() }.validate().is_err());
        assert!(quick().validate().is_ok());
    }

    #[test]
    fn tail_check_of_j9_stays_positive() {
        let t = tail_spot_check(RegionId::J9, &region_plan(RegionId::J9), 2000);
        assert!(t.samples > 1000);
        assert_eq!(t.nonpositive, 0, "{t:?}");
    }
}
