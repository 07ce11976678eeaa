//! Independent re-verification of certificate files. Nothing stored in a
//! certificate is trusted except as a claim to be recomputed: boxes are
//! rebuilt from the region definition, the grid and the bisection paths,
//! and every leaf status is re-derived with the interval kernel.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{box_at, Leaf, LeafStatus, PartContext};
use super::local::{contracts, krawczyk, subsystem, LocalUniquenessCertificate};
use super::{
    fingerprint, part_contexts, sha256_hex, Certificate, Manifest, FORMAT_LOCAL, FORMAT_MANIFEST,
    FORMAT_REGION, FORMAT_VERSION,
};
use crate::interval::{star_enclosure, Box2, IntervalError};
use crate::model::FreePoint;
use crate::potential::residual_vector;
use crate::regions::{pentagon_box, region_def, region_plan, Grid, RegionId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("malformed certificate {path}: {reason}")]
    MalformedCertificate { path: String, reason: String },
    #[error(
        "leaf bound violation in {region} ({part}), root {root}, path `{path}`, \
         box r3 ∈ [{}, {}], r5 ∈ [{}, {}]: {reason}", r3[0], r3[1], r5[0], r5[1]
    )]
    LeafBoundViolation {
        region: RegionId,
        part: String,
        root: u32,
        path: String,
        r3: [f64; 2],
        r5: [f64; 2],
        reason: String,
    },
    #[error(
        "coverage gap in {region} ({part}), root {root}: box r3 ∈ [{}, {}], r5 ∈ [{}, {}] {detail}",
        r3[0], r3[1], r5[0], r5[1]
    )]
    CoverageGap {
        region: RegionId,
        part: String,
        root: u32,
        r3: [f64; 2],
        r5: [f64; 2],
        detail: String,
    },
    #[error("local uniqueness certificate rejected: {0}")]
    LocalRejected(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub region: RegionId,
    pub min_gap: f64,
    pub leaves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: String,
    pub regions: Vec<RegionSummary>,
    pub local_checked: bool,
    pub summary: String,
}

impl Verdict {
    pub fn leaves_checked(&self) -> usize {
        self.regions.iter().map(|r| r.leaves).sum()
    }
}

fn malformed(path: &Path, reason: impl Into<String>) -> VerifyError {
    VerifyError::MalformedCertificate { path: path.display().to_string(), reason: reason.into() }
}

#[derive(Deserialize)]
struct Header {
    format: String,
}

/// Verifies a region certificate, a local certificate, a bundle manifest,
/// or a bundle directory (through its `manifest.json`).
pub fn verify_certificate(path: &Path) -> Result<Verdict, VerifyError> {
    let path: PathBuf =
        if path.is_dir() { path.join("manifest.json") } else { path.to_path_buf() };
    let bytes = std::fs::read(&path).map_err(|e| malformed(&path, e.to_string()))?;
    let header: Header =
        serde_json::from_slice(&bytes).map_err(|e| malformed(&path, e.to_string()))?;
    match header.format.as_str() {
        FORMAT_REGION => {
            let cert: Certificate =
                serde_json::from_slice(&bytes).map_err(|e| malformed(&path, e.to_string()))?;
            let s = verify_region(&cert, &path)?;
            Ok(Verdict {
                kind: "region".into(),
                summary: format!(
                    "{}: {} leaves re-verified, min gap {:.6e}",
                    s.region, s.leaves, s.min_gap
                ),
                regions: vec![s],
                local_checked: false,
            })
        }
        FORMAT_LOCAL => {
            let cert: LocalUniquenessCertificate =
                serde_json::from_slice(&bytes).map_err(|e| malformed(&path, e.to_string()))?;
            verify_local(&cert)?;
            Ok(Verdict {
                kind: "local".into(),
                regions: vec![],
                local_checked: true,
                summary: "Krawczyk contraction on B0 re-verified".into(),
            })
        }
        FORMAT_MANIFEST => {
            let manifest: Manifest =
                serde_json::from_slice(&bytes).map_err(|e| malformed(&path, e.to_string()))?;
            verify_manifest(&manifest, path.parent().unwrap_or(Path::new(".")), &path)
        }
        other => Err(malformed(&path, format!("unknown format `{other}`"))),
    }
}

fn verify_manifest(m: &Manifest, dir: &Path, path: &Path) -> Result<Verdict, VerifyError> {
    if m.version != FORMAT_VERSION || m.fingerprint != fingerprint() {
        return Err(malformed(path, "version or kernel fingerprint mismatch"));
    }
    let read = |file: &str, sha: &str| -> Result<(PathBuf, Vec<u8>), VerifyError> {
        let p = dir.join(file);
        if Path::new(file).components().count() != 1 {
            return Err(malformed(path, format!("entry `{file}` is not a plain file name")));
        }
        let bytes = std::fs::read(&p).map_err(|e| malformed(&p, e.to_string()))?;
        if sha256_hex(&bytes) != sha {
            return Err(malformed(&p, "sha256 differs from the manifest"));
        }
        Ok((p, bytes))
    };

    let local_path = dir.join(&m.local.file);
    let local_bytes = std::fs::read(&local_path).map_err(|e| malformed(&local_path, e.to_string()))?;
    let local: LocalUniquenessCertificate =
        serde_json::from_slice(&local_bytes).map_err(|e| malformed(&local_path, e.to_string()))?;
    verify_local(&local)?;
    read(&m.local.file, &m.local.sha256)?;
    let b0 = local.b0.get().ok_or_else(|| malformed(&local_path, "bad B0"))?;

    let mut seen = BTreeMap::new();
    for entry in &m.entries {
        let p = dir.join(&entry.file);
        let bytes = std::fs::read(&p).map_err(|e| malformed(&p, e.to_string()))?;
        let cert: Certificate =
            serde_json::from_slice(&bytes).map_err(|e| malformed(&p, e.to_string()))?;
        let summary = verify_region(&cert, &p)?;
        read(&entry.file, &entry.sha256)?;
        if entry.region != Some(cert.region) {
            return Err(malformed(&p, "manifest entry names a different region"));
        }
        if cert.truncation_r5.is_some_and(|t| t.0 != m.config.truncation_r5) {
            return Err(malformed(&p, "truncation differs from the bundle configuration"));
        }
        if let Some(ex) = cert.excluded {
            let ex = ex.get().ok_or_else(|| malformed(&p, "bad excluded box"))?;
            if !ex.subset_of(&b0) {
                return Err(malformed(&p, "excluded box is not covered by the local certificate"));
            }
        }
        if seen.insert(cert.region, summary).is_some() {
            return Err(malformed(&p, format!("{} appears twice", cert.region)));
        }
    }
    let missing: Vec<String> = RegionId::SUBREGIONS
        .iter()
        .filter(|id| !seen.contains_key(id))
        .map(|id| id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(malformed(path, format!("bundle lacks {}", missing.join(", "))));
    }
    let regions: Vec<RegionSummary> = seen.into_values().collect();
    let leaves: usize = regions.iter().map(|r| r.leaves).sum();
    Ok(Verdict {
        kind: "bundle".into(),
        summary: format!(
            "{}; 16 regions ({leaves} leaves) and the local certificate re-verified",
            m.verdict
        ),
        regions,
        local_checked: true,
    })
}

/// Re-checks the Krawczyk contraction from the stored preconditioner and
/// the full residual at the stored root.
pub fn verify_local(cert: &LocalUniquenessCertificate) -> Result<(), VerifyError> {
    let reject = |m: &str| Err(VerifyError::LocalRejected(m.to_string()));
    if cert.format != FORMAT_LOCAL || cert.version != FORMAT_VERSION || cert.fingerprint != fingerprint() {
        return reject("format, version or kernel fingerprint mismatch");
    }
    if cert.subsystem != subsystem() {
        return reject("unexpected residual subsystem");
    }
    let b0 = pentagon_box(cert.delta.0);
    if cert.b0.get() != Some(b0) {
        return reject("B0 is not [1-δ, 1+δ]²");
    }
    let c = cert.preconditioner.map(|row| row.map(|x| x.0));
    let kr = match krawczyk(&b0, c) {
        Ok(kr) => kr,
        Err(e) => return Err(VerifyError::LocalRejected(e.to_string())),
    };
    if cert.krawczyk.get() != Some(kr.k) || cert.contraction_norm.0 != kr.norm {
        return reject("stored Krawczyk image does not reproduce");
    }
    if !contracts(&b0, &kr) {
        return reject("Krawczyk image is not strictly inside B0");
    }
    let root = FreePoint::new(cert.root[0], cert.root[1]);
    match residual_vector(root) {
        Ok(rv) if rv.pairwise_spread <= 1e-10 && rv.y1.abs() <= 1e-10 && kr.k.contains(root.r3, root.r5) => Ok(()),
        _ => reject("stored root does not satisfy the full residual"),
    }
}

/// Re-verifies every leaf of a region certificate and the coverage of each
/// root box by its leaves.
pub fn verify_region(cert: &Certificate, path: &Path) -> Result<RegionSummary, VerifyError> {
    let bad = |reason: String| Err(malformed(path, reason));
    if cert.format != FORMAT_REGION || cert.version != FORMAT_VERSION {
        return bad("unsupported format or version".into());
    }
    if cert.fingerprint != fingerprint() {
        return bad(format!("kernel fingerprint {} differs from {}", cert.fingerprint, fingerprint()));
    }
    let id = cert.region;
    if id == RegionId::SHat || cert.plan != region_plan(id) {
        return bad(format!("plan does not match the plan of {id}"));
    }
    let region = region_def(id);
    let truncation = cert.truncation_r5.map(|t| t.0);
    if region.unbounded != truncation.is_some() {
        return bad("truncation must be present exactly for unbounded regions".into());
    }
    let w = cert.max_box_width.0;
    if !(w > 0.0 && w <= 1.0) {
        return bad(format!("max_box_width {w} out of range"));
    }
    let b0 = match cert.excluded {
        Some(hb) => match hb.get() {
            Some(b) if b.contains(1.0, 1.0) => Some(b),
            _ => return bad("excluded box must contain (1, 1)".into()),
        },
        None => None,
    };
    let contexts = part_contexts(&cert.plan, truncation, b0);
    if contexts.len() != cert.parts.len() {
        return bad("part count differs from the plan".into());
    }

    let mut min_gap = f64::INFINITY;
    let mut leaves = 0;
    for ((ctx, part), plan_part) in contexts.iter().zip(&cert.parts).zip(&cert.plan.parts) {
        if part.label != plan_part.label
            || part.checks != plan_part.checks
            || part.r3_band.map(|b| (b[0].0, b[1].0)) != plan_part.r3_band
        {
            return bad(format!("part {} does not match the plan", part.label));
        }
        let rect = ctx.rect().map_err(|e| malformed(path, e.to_string()))?;
        let grid = Grid::new(rect, w);
        if part.rect.get() != Some(rect) || (part.nx, part.ny) != (grid.nx, grid.ny) {
            return bad(format!("part {} root grid does not match the region", part.label));
        }
        check_coverage(id, &part.label, &grid, &part.leaves, path)?;
        let part_min = part
            .leaves
            .par_iter()
            .map(|leaf| check_leaf(id, &part.label, ctx, &grid, leaf))
            .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
        if part_min.to_bits() != part.min_gap.0.to_bits() {
            return bad(format!("part {} min_gap does not match its leaves", part.label));
        }
        min_gap = min_gap.min(part_min);
        leaves += part.leaves.len();
    }
    if min_gap.to_bits() != cert.min_gap.0.to_bits() || !(min_gap > 0.0) {
        return bad("min_gap does not match the leaves".into());
    }
    Ok(RegionSummary { region: id, min_gap, leaves })
}

fn check_leaf(
    id: RegionId,
    part: &str,
    ctx: &PartContext,
    grid: &Grid,
    leaf: &Leaf,
) -> Result<f64, VerifyError> {
    let root_box = grid.cell(leaf.root as usize);
    let violation = |b: Box2, reason: String| VerifyError::LeafBoundViolation {
        region: id,
        part: part.to_string(),
        root: leaf.root,
        path: leaf.path.clone(),
        r3: [b.r3.lo(), b.r3.hi()],
        r5: [b.r5.lo(), b.r5.hi()],
        reason,
    };
    let b = box_at(root_box, &leaf.path)
        .ok_or_else(|| violation(root_box, "path contains characters other than 0/1".into()))?;
    match &leaf.status {
        LeafStatus::Certified { bounds } => {
            let stored: Vec<f64> = bounds.iter().map(|x| x.0).collect();
            if let Some(x) = stored.iter().find(|x| !(**x > 0.0)) {
                return Err(violation(b, format!("stored bound {x} is not positive")));
            }
            let fresh = ctx.check_bounds(&b).map_err(|e| violation(b, e.to_string()))?;
            if fresh.iter().map(|x| x.to_bits()).ne(stored.iter().map(|x| x.to_bits())) {
                return Err(violation(b, format!("stored bounds {stored:?} but recomputed {fresh:?}")));
            }
            Ok(fresh.into_iter().fold(f64::INFINITY, f64::min))
        }
        LeafStatus::ApexLemma { bound } => match ctx.apex_bound(&b) {
            Some(x) if x > 0.0 && x.to_bits() == bound.0.to_bits() => Ok(x),
            other => Err(violation(b, format!("apex bound {} recomputes as {other:?}", bound.0))),
        },
        LeafStatus::Outside => {
            if ctx.excludes(&b) {
                Ok(f64::INFINITY)
            } else {
                Err(violation(b, "box meets the region".into()))
            }
        }
        LeafStatus::OutsideDomain => match star_enclosure(b.r3, b.r5) {
            Err(IntervalError::DomainError) => Ok(f64::INFINITY),
            _ => Err(violation(b, "box meets the closure of the domain".into())),
        },
        LeafStatus::InsideB0 => {
            if ctx.inside_b0(&b) {
                Ok(f64::INFINITY)
            } else {
                Err(violation(b, "box is not inside the excluded square".into()))
            }
        }
    }
}

/// The leaves of each root must be the leaves of a complete binary
/// bisection tree: prefix-free, with no missing branch.
fn check_coverage(
    id: RegionId,
    part: &str,
    grid: &Grid,
    leaves: &[Leaf],
    path: &Path,
) -> Result<(), VerifyError> {
    let mut by_root: Vec<Vec<&str>> = vec![Vec::new(); grid.len()];
    for leaf in leaves {
        match by_root.get_mut(leaf.root as usize) {
            Some(v) => v.push(&leaf.path),
            None => return Err(malformed(path, format!("leaf root {} outside the grid", leaf.root))),
        }
    }
    for (root, paths) in by_root.iter_mut().enumerate() {
        paths.sort_unstable();
        if let Err((prefix, detail)) = complete_tree("", paths) {
            let root_box = grid.cell(root);
            let b = box_at(root_box, &prefix).unwrap_or(root_box);
            if detail.is_empty() {
                return Err(VerifyError::CoverageGap {
                    region: id,
                    part: part.to_string(),
                    root: root as u32,
                    r3: [b.r3.lo(), b.r3.hi()],
                    r5: [b.r5.lo(), b.r5.hi()],
                    detail: format!("(path `{prefix}`) is covered by no leaf"),
                });
            }
            return Err(malformed(path, format!("root {root}, path `{prefix}`: {detail}")));
        }
    }
    Ok(())
}

/// `paths` sorted, all starting with `prefix`. Errors carry the offending
/// prefix and an empty detail for a gap, a message for an overlap.
fn complete_tree(prefix: &str, paths: &[&str]) -> Result<(), (String, String)> {
    match paths {
        [] => Err((prefix.to_string(), String::new())),
        [only] if *only == prefix => Ok(()),
        [first, ..] if *first == prefix => {
            Err((prefix.to_string(), "leaf overlaps its descendants".into()))
        }
        _ => {
            let split = paths.partition_point(|p| p.as_bytes()[prefix.len()] == b'0');
            complete_tree(&format!("{prefix}0"), &paths[..split])?;
            complete_tree(&format!("{prefix}1"), &paths[split..])
        }
    }
}
