//! Certifies all sixteen regions plus the local uniqueness box, writes the
//! bundle and re-verifies it from disk.
//!
//! cargo run --release --example certify_all -- [out_dir] [max_box_width]

use std::path::PathBuf;

use starcc::certify::{certify_all, verify_certificate, CertifyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "out/certificates".into()));
    let mut config = CertifyConfig::default();
    if let Some(w) = args.next() {
        config.max_box_width = w.parse()?;
    }
    let bundle = certify_all(&config)?;
    for c in &bundle.certificates {
        println!(
            "{:>4}  leaves {:>9}  depth {:>2}  min gap {:>12.6e}  {:>7.2}s",
            c.region.to_string(),
            c.leaf_count(),
            c.stats.max_depth,
            c.min_gap.0,
            c.stats.wall_time_s
        );
    }
    println!("local: Krawczyk norm {:.4}", bundle.local.contraction_norm.0);
    bundle.write(&dir)?;
    println!("{} ({:.1}s)", bundle.verdict(), bundle.wall_time_s);
    let verdict = verify_certificate(&dir)?;
    println!("verify: {}", verdict.summary);
    Ok(())
}
