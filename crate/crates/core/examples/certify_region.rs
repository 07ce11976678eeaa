//! Certifies one region's plan and prints the per-part summary.
//!
//! cargo run --release --example certify_region -- J16 [max_box_width]

use starcc::certify::{certify_inequality, CertifyConfig, LeafStatus};
use starcc::regions::{region_plan, RegionId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id: RegionId = args.next().unwrap_or_else(|| "J16".into()).parse()?;
    let mut config = CertifyConfig::default();
    if let Some(w) = args.next() {
        config.max_box_width = w.parse()?;
    }
    let plan = region_plan(id);
    let cert = certify_inequality(id, &plan, &config)?;
    for part in &cert.parts {
        let certified = part.leaves.iter().filter(|l| matches!(l.status, LeafStatus::Certified { .. })).count();
        println!(
            "{} band {:?}: {} roots, {} leaves ({} certified), min gap {:.6e}{}",
            part.label,
            plan.parts.iter().find(|p| p.label == part.label).and_then(|p| p.r3_band),
            part.nx * part.ny,
            part.leaves.len(),
            certified,
            part.min_gap.0,
            plan.parts.iter().find(|p| p.label == part.label).and_then(|p| p.note.clone()).map(|n| format!(" — {n}")).unwrap_or_default()
        );
    }
    println!("{id}: min gap {:.6e}, {} boxes expanded, max depth {}", cert.min_gap.0, cert.stats.boxes_expanded, cert.stats.max_depth);
    Ok(())
}
