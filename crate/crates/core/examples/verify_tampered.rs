//! Certifies J1, verifies the file, then edits one leaf bound and shows the
//! verifier's rejection.

use starcc::certify::{certify_inequality, verify_certificate, CertifyConfig, LeafStatus};
use starcc::regions::{region_plan, RegionId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("J1.json");
    let config = CertifyConfig { max_box_width: 0.05, ..CertifyConfig::default() };
    let mut cert = certify_inequality(RegionId::J1, &region_plan(RegionId::J1), &config)?;
    std::fs::write(&path, serde_json::to_vec(&cert)?)?;
    println!("original: {:?}", verify_certificate(&path).map(|v| v.summary));

    if let Some(leaf) = cert.parts[0].leaves.iter_mut().find(|l| matches!(l.status, LeafStatus::Certified { .. })) {
        if let LeafStatus::Certified { bounds } = &mut leaf.status {
            bounds[0].0 += 1.0;
        }
    }
    std::fs::write(&path, serde_json::to_vec(&cert)?)?;
    match verify_certificate(&path) {
        Ok(v) => println!("edited: accepted?! {}", v.summary),
        Err(e) => println!("edited: rejected: {e}"),
    }
    Ok(())
}
